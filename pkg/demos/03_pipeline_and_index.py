"""
Crawl a URL list, annotate its images and query the index
==========================================================

Runs over the bundled fixture pages (one of which is missing on purpose)
and writes the index into a temporary directory.
"""
import os
import shutil
import tempfile

from kwrank import load_config, load_index, run_pipeline

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "fixtures")

work = tempfile.mkdtemp()
shutil.copytree(FIXTURES, os.path.join(work, "fixtures"))
config = load_config(os.path.join(work, "fixtures", "nature", "run.conf"))

summary = run_pipeline(config)
print(summary.render())

###############################################################################
# The index file is plain text: one image per line.
with open(config.index_path, "rb") as fh:
    data = fh.read()
print(data.decode())

index = load_index(data)
for keyword in ["mountain", "Tree", "zebra"]:
    hits = index.query(keyword)
    print(keyword, "->", [(img.image_id, img.get(keyword.lower()).count) for img in hits])

shutil.rmtree(work)
