"""
Rule bases: loading, ranking, cycles and mining
===============================================
"""
import os

from kwrank import (CyclicKnowledgeBase, backward_words, load_kb, mine_rules, oracle_path_count, rank, save_kb,
                    validate_acyclic)

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "fixtures")


def read(name):
    with open(os.path.join(FIXTURES, name), "rb") as fh:
        return fh.read()


kb = load_kb(read("nature.kb"))
print(kb, "vocabulary:", sorted(kb.vocabulary))
print("backward words of nature:", sorted(backward_words(kb, "nature")))

# rank and the brute-force path count always agree: rank = paths / n_total
for word in ["mountain", "sky", "nature", "grass", "sun"]:
    s = rank(kb, word)
    print(f"{word:>9}: rank {s.decimal:<15} paths {oracle_path_count(kb, word)}")

###############################################################################
# A cycle makes the recursion undefined, so ranking refuses it.
cyclic = load_kb(read("cyclic.kb"))
print("cycle behind x:", validate_acyclic(cyclic, "x"))
try:
    rank(cyclic, "x")
except CyclicKnowledgeBase as exc:
    print("refused:", exc)

###############################################################################
# Mine pairwise rules from annotation co-occurrence and write the KB file.
transactions = [{"water", "mountain"}, {"water", "mountain"}, {"water", "sky"}]
mined = mine_rules(transactions, "0.5", "0.6")
print(save_kb(mined))
