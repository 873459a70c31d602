#!/usr/bin/env python3
"""A complete command-line session: write the JSON artifacts, then drive
every subcommand the way a shell user would.

Everything lands in ./cli_session_out (safe to delete).
"""

import json
import pathlib

import implogic as il
from implogic.cli import main

out = pathlib.Path("cli_session_out")
out.mkdir(exist_ok=True)

spec = il.bottom_device_spec()
(out / "device.json").write_text(json.dumps(spec.to_json(), indent=2))

circuit = il.build_default_stack().to_json()
circuit["specs"] = {"bottom": spec.to_json(), "top": spec.to_json()}
(out / "circuit.json").write_text(json.dumps(circuit, indent=2))

nand = il.with_inputs(il.nand_macro("B1", "B2", "T2"), {"a": 1, "b": 1})
program = nand.to_json()
program["configs"] = {name: cfg.to_json()
                      for name, cfg in il.default_configs(spec).items()}
(out / "nand.json").write_text(json.dumps(program, indent=2))

commands = [
    ["margins", "--spec", str(out / "device.json"), "--sweep", "0,1,50",
     "--ratios", "3,10,100", "--out", str(out / "margin_sweep.csv")],
    ["optimize", "--topology", str(out / "circuit.json"),
     "--pairs", "B1:T2,T2:B1", "--load", "current",
     "--out", str(out / "bias.json")],
    ["run", "--program", str(out / "nand.json"),
     "--topology", str(out / "circuit.json"),
     "--trace", str(out / "nand_trace.jsonl"),
     "--out", str(out / "nand_run.json")],
    ["adder", "--a", "173", "--b", "91", "--cin", "1",
     "--out", str(out / "adder.json")],
    ["yield", "--program", str(out / "nand.json"),
     "--topology", str(out / "circuit.json"), "--trials", "500", "--seed", "7",
     "--per-trial", str(out / "trials.csv"), "--out", str(out / "yield.json")],
]

for argv in commands:
    print(f"$ implogic {' '.join(argv)}")
    rc = main(argv)
    print(f"  -> exit {rc}")

print()
print("artifacts:")
for path in sorted(out.iterdir()):
    print(f"   {path} ({path.stat().st_size} bytes)")

print()
print("bias.json:", (out / "bias.json").read_text().strip()[:300], "...")
print()
print("adder.json:", (out / "adder.json").read_text().strip())
