#!/usr/bin/env python3
"""Assemble the bundled desk-scale corpus and evaluation sets under data/.

Inputs are the unpacked npm package @stdlib/datasets-sotu (State of the Union
addresses, CC0) and the gensim source tree's test_data directory (WordSim-353,
SimLex-999 and the word2vec analogy questions).

    npm pack @stdlib/datasets-sotu && tar xzf stdlib-datasets-sotu-*.tgz
    pip download gensim==4.3.2 --no-deps --no-binary :all: && tar xzf gensim-4.3.2.tar.gz
    python3 scripts/prepare_desk_data.py --sotu package/data \
        --gensim-test-data gensim-4.3.2/gensim/test/test_data --out data
"""
import argparse
import gzip
import pathlib
import shutil


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sotu", required=True, type=pathlib.Path)
    ap.add_argument("--gensim-test-data", required=True, type=pathlib.Path)
    ap.add_argument("--out", required=True, type=pathlib.Path)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    # One address per line, oldest first.
    lines = []
    for path in sorted(args.sotu.glob("*.txt")):
        text = " ".join(path.read_text(encoding="utf-8").split())
        if text:
            lines.append(text)
    with gzip.GzipFile(args.out / "sotu.txt.gz", "wb", mtime=0) as gz:
        gz.write(("\n".join(lines) + "\n").encode("utf-8"))

    for name in ("wordsim353.tsv", "simlex999.txt", "questions-words.txt"):
        shutil.copyfile(args.gensim_test_data / name, args.out / name)


if __name__ == "__main__":
    main()
