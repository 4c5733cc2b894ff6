"""Record replay transcripts for the pipeline fixtures.

Each fixture has a ``<name>.responses.json`` list of responses written
by hand.  The pipeline is run once with those responses served in call
order; every exchange is saved to ``<name>.json`` so later runs can
replay them by prompt hash.

    python scripts/record_transcripts.py [name ...]
"""
import argparse
import json
import sys
from pathlib import Path

from fpvkit.model import load_model
from fpvkit.pipeline import RunConfig, ScriptedProvider, ingest_spec, load_corpus, run_pipeline

ROOT = Path(__file__).resolve().parents[1]
TRANSCRIPTS = ROOT / "fixtures" / "transcripts"


def record(name: str) -> Path:
    manifest = json.loads((TRANSCRIPTS / f"{name}.manifest.json").read_text())
    responses = json.loads((TRANSCRIPTS / f"{name}.responses.json").read_text())
    provider = ScriptedProvider(responses)
    run_pipeline(ingest_spec(ROOT / manifest["spec"]), load_model(ROOT / manifest["model"]), provider,
                 RunConfig(), load_corpus(ROOT / manifest["docs"]), sleep=lambda s: None)
    if len(provider.exchanges) != len(responses):
        raise SystemExit(f"{name}: pipeline used {len(provider.exchanges)} of {len(responses)} responses")
    out = ROOT / manifest["transcript"]
    records = [dict(ex.to_dict(), provider="replay") for ex in provider.exchanges]
    out.write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=None)
    args = ap.parse_args(argv)
    names = args.names or sorted(p.name[: -len(".manifest.json")] for p in TRANSCRIPTS.glob("*.manifest.json"))
    for n in names:
        print(f"recorded {record(n).relative_to(ROOT)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
