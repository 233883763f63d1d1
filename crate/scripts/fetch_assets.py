#!/usr/bin/env python3
"""Fetches the published data assets the acceptance suite runs against.

Downloads (a few MB of text assets, no model weights):
  - GPT-2 vocab.json + merges.txt            -> assets/gpt2/
  - bert-base-cased vocab.txt                -> assets/bert/
  - xlnet-base-cased spiece.model            -> assets/xlnet/ (+ TSV export)
  - wikitext-2-raw-v1 train split (parquet)  -> assets/wikitext/wiki.train.raw
  - MorphoLEX_en.xlsx word lists             -> assets/lexicon/morpholex_words.txt

Base URLs can be pointed at mirrors:
  HF_BASE_URL       (default https://huggingface.co)
  GITHUB_BASE_URL   (default https://github.com)

Python deps: pandas + pyarrow (parquet), openpyxl (xlsx), sentencepiece
(model -> TSV export). Install with:
  pip install pandas pyarrow openpyxl sentencepiece
"""

import os
import sys
import urllib.request
from pathlib import Path

HF = os.environ.get("HF_BASE_URL", "https://huggingface.co").rstrip("/")
GH = os.environ.get("GITHUB_BASE_URL", "https://github.com").rstrip("/")

ROOT = Path(__file__).resolve().parent.parent
ASSETS = ROOT / "assets"

DOWNLOADS = [
    (f"{HF}/gpt2/resolve/main/vocab.json", "gpt2/vocab.json"),
    (f"{HF}/gpt2/resolve/main/merges.txt", "gpt2/merges.txt"),
    (f"{HF}/bert-base-cased/resolve/main/vocab.txt", "bert/vocab.txt"),
    (f"{HF}/xlnet-base-cased/resolve/main/spiece.model", "xlnet/spiece.model"),
    (
        f"{HF}/datasets/Salesforce/wikitext/resolve/main/"
        "wikitext-2-raw-v1/train-00000-of-00001.parquet",
        "wikitext/train.parquet",
    ),
    (
        f"{GH}/hugomailhot/MorphoLex-en/raw/master/MorphoLEX_en.xlsx",
        "lexicon/MorphoLEX_en.xlsx",
    ),
]


def fetch(url: str, dest: Path) -> None:
    if dest.exists():
        print(f"  kept     {dest.relative_to(ROOT)}")
        return
    dest.parent.mkdir(parents=True, exist_ok=True)
    print(f"  fetching {url}")
    with urllib.request.urlopen(url) as response, open(dest, "wb") as out:
        out.write(response.read())
    print(f"  wrote    {dest.relative_to(ROOT)} ({dest.stat().st_size} bytes)")


def export_wikitext() -> None:
    raw = ASSETS / "wikitext/wiki.train.raw"
    if raw.exists():
        print(f"  kept     {raw.relative_to(ROOT)}")
        return
    import pandas as pd

    df = pd.read_parquet(ASSETS / "wikitext/train.parquet")
    # rows carry their trailing newlines; blank rows are blank lines
    text = "".join(df["text"])
    raw.write_text(text, encoding="utf-8")
    print(f"  wrote    {raw.relative_to(ROOT)} ({raw.stat().st_size} bytes)")


def export_lexicon() -> None:
    out = ASSETS / "lexicon/morpholex_words.txt"
    if out.exists():
        print(f"  kept     {out.relative_to(ROOT)}")
        return
    import warnings

    import pandas as pd

    words = set()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        xl = pd.ExcelFile(ASSETS / "lexicon/MorphoLEX_en.xlsx")
        for name in xl.sheet_names:
            frame = xl.parse(name)
            for column in frame.columns:
                if str(column).strip().lower() == "word":
                    words.update(frame[column].dropna().astype(str))
    out.write_text("\n".join(sorted(words)) + "\n", encoding="utf-8")
    print(f"  wrote    {out.relative_to(ROOT)} ({len(words)} words)")


def export_spiece_tsv() -> None:
    out = ASSETS / "xlnet/spiece.tsv"
    if out.exists():
        print(f"  kept     {out.relative_to(ROOT)}")
        return
    import sentencepiece as spm

    sp = spm.SentencePieceProcessor()
    sp.load(str(ASSETS / "xlnet/spiece.model"))
    with open(out, "w", encoding="utf-8") as f:
        for i in range(sp.get_piece_size()):
            f.write(f"{sp.id_to_piece(i)}\t{sp.get_score(i)!r}\n")
    print(f"  wrote    {out.relative_to(ROOT)} ({sp.get_piece_size()} pieces)")


def main() -> int:
    print(f"assets -> {ASSETS}")
    for url, rel in DOWNLOADS:
        fetch(url, ASSETS / rel)
    export_wikitext()
    export_lexicon()
    export_spiece_tsv()
    print("done")
    return 0


if __name__ == "__main__":
    sys.exit(main())
