"""
The bundled corpus and its reports
==================================

Every corpus entry is a DSL file with golden expected values.  Running an
entry produces a Report, which serializes to JSON or text.
"""

from edskit.corpus import load_manifest, run_corpus, run_entry

entries = load_manifest()
print(len(entries), "entries")
for e in entries[:4]:
    print(f"  {e.name:20} {e.mode:8} {e.citation}")

res = run_entry(next(e for e in entries if e.name == "einstein_weyl"))
print(res.passed)
print(res.report.without_timing().to_text())

# a subset, run on four workers; order follows the manifest
summary = run_corpus("const_ricci*", jobs=4)
print(summary.table())
