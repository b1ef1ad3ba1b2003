#!/usr/bin/env python3
"""Dump a named preset config to JSON, as a starting point for custom runs."""

import argparse

from snls.config import dump_config
from snls.presets import get_preset, preset_names


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("preset", nargs="?", help="preset name (omit to list)")
    ap.add_argument("--out", default=None, help="output path (default: <name>.json)")
    args = ap.parse_args()
    if not args.preset:
        print("\n".join(preset_names()))
        return
    cfg = get_preset(args.preset)
    path = args.out or f"{args.preset}.json"
    dump_config(cfg, path)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
