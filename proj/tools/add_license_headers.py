#!/usr/bin/env python3
# Copyright 2026 The GSG-I Lab Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Prepends the license header to first-party sources that lack it."""

import argparse
import pathlib

LINES = [
    "Copyright 2026 The GSG-I Lab Authors.",
    "",
    'Licensed under the Apache License, Version 2.0 (the "License");',
    "you may not use this file except in compliance with the License.",
    "You may obtain a copy of the License at",
    "",
    "    http://www.apache.org/licenses/LICENSE-2.0",
    "",
    "Unless required by applicable law or agreed to in writing, software",
    'distributed under the License is distributed on an "AS IS" BASIS,',
    "WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.",
    "See the License for the specific language governing permissions and",
    "limitations under the License.",
]

STYLES = {".cpp": "//", ".hpp": "//", ".h": "//", ".cc": "//", ".py": "#", ".txt": "#", ".cmake": "#"}
DIRS = ["include", "src", "tests", "tools"]


def header(prefix):
    return "".join((prefix + " " + l).rstrip() + "\n" for l in LINES) + "\n"


def process(path, check):
    prefix = STYLES.get(path.suffix)
    if prefix is None:
        return False
    text = path.read_text()
    if any(LINES[0] in line for line in text.splitlines()[:3]):
        return False
    if check:
        print(f"missing header: {path}")
        return True
    shebang = ""
    if text.startswith("#!"):
        shebang, _, text = text.partition("\n")
        shebang += "\n"
    path.write_text(shebang + header(prefix) + text)
    return True


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--root", default=pathlib.Path(__file__).resolve().parent.parent, type=pathlib.Path)
    ap.add_argument("--check", action="store_true", help="only report files without a header")
    args = ap.parse_args()
    files = [args.root / "CMakeLists.txt"]
    for d in DIRS:
        files += sorted(p for p in (args.root / d).rglob("*") if p.is_file())
    changed = [p for p in files if process(p, args.check)]
    if not args.check:
        print(f"added headers to {len(changed)} files")
    return 1 if args.check and changed else 0


if __name__ == "__main__":
    raise SystemExit(main())
