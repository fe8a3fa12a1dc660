"""Walk through the spend script end to end.

A genesis state holding three satoshi is put on a menu next to a burn
alternative. Committing a transaction that selects the genesis branch and
obliges two coins to fresh addresses leaves the third coin where it was.
Every intermediate state is printed, then the final ledger.

Run:  python demos/run_spend_example.py
"""
import json
import pathlib

from llbc import check, normalize, parse_script, readback_ledger, render

HERE = pathlib.Path(__file__).parent

source = (HERE / "spend.llbc").read_text()
program, declared = parse_script(source)

judgment = check(program, declared)
print("interface types:", ", ".join(render(t) for t in judgment.interface_types))
print()

print("initial state:")
print(" ", render(program))
outcome = normalize(program, fuel=100, trace=True)
for step in outcome.trace:
    print(f"  step {step.index}: {step.redex.kind} at {step.redex.pos}")
    print(" ", render(step.program))

print()
print(f"normal form after {outcome.steps} steps:")
print(" ", render(outcome.result))

ledger = readback_ledger(outcome.result)
print()
print("ledger:")
print(json.dumps(ledger.to_json_dict(), indent=2, sort_keys=True))
