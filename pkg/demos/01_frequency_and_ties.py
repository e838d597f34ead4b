"""
Candidate keywords and same-frequency ties
==========================================

Ten keywords with known counts, a 40% threshold, and a small rule base
that decides which of the tied keywords matters more.
"""
import os
from fractions import Fraction

from kwrank import FrequencyTable, detect_ties, load_kb, rank_all, resolve_tie, select_candidates

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "tests", "fixtures")

# keyword counts for one page
counts = {"a": 4, "b": 6, "c": 3, "d": 6, "e": 5, "f": 2, "g": 2, "h": 1, "i": 3, "j": 1}
table = FrequencyTable(counts)

# the threshold is a share of the distinct keywords: 0.4 * 10 -> top 4
candidates = select_candidates(table, Fraction(2, 5))
print("candidates:", candidates.members)

ties = detect_ties(candidates)
print("ties:", [(g.count, sorted(g.keywords)) for g in ties])

###############################################################################
# Rank the tied keywords against the rule base. Every backward word adds
# 1/n_total plus its own rank, so b (7 paths in) beats d (4 paths in).
with open(os.path.join(FIXTURES, "letters.kb"), "rb") as fh:
    kb = load_kb(fh.read())
print("n_total:", kb.n_total)

report = rank_all(kb, ties[0].keywords)
for score in report.ordered():
    print(f"  {score.keyword}: {score.score} = {score.decimal} ({score.contributing_paths} paths)")

print("order:", resolve_tie(kb, ties[0], report))
