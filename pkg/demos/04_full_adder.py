#!/usr/bin/env python3
"""Full adder and 8-bit ripple-carry addition on six memristors.

The adder stack is two stacked 2x2 crossbars over six wires with two cells
never formed. The compiler schedules the standard 9-NAND decomposition plus
four NOTs (two complement-pair moves) onto the six usable cells, with the
carry-out landing back in the carry-in cell so rounds chain on one circuit.
"""

import itertools

import implogic as il

stack = il.build_adder_stack()
print("=" * 70)
print("The six-cell adder stack")
print("=" * 70)
print(f"positions: {sorted(stack.cells)}")
print(f"never formed: {sorted(stack.unusable_cells)}")
for cell in stack.usable_cells():
    print(f"   {cell}: neighbors {sorted(stack.neighbors(cell))}")
print()

fa = il.compile_full_adder(stack)
resets, imps = fa.census()
print(f"compiled full adder: {resets} resets + {imps} implications "
      f"({len(fa.steps)} steps)")
print(f"inputs  : {fa.declared_inputs}")
print(f"outputs : {fa.declared_outputs}  (carry returns to the carry-in cell)")
print()

spec = il.ideal_device_spec()
specs = {"bottom": spec, "top": spec}
configs = il.default_configs(spec)

print("=" * 70)
print("Exhaustive check against a + b + c_in")
print("=" * 70)
for a, b, c in itertools.product((0, 1), repeat=3):
    prog = il.with_inputs(fa, {"a": a, "b": b, "c_in": c})
    bits = il.execute(prog, stack, specs, configs).output_bits(prog)
    ok = (bits["s"], bits["c_out"]) == ((a + b + c) & 1, (a + b + c) >> 1)
    print(f"   {a}+{b}+{c} -> s={bits['s']} c_out={bits['c_out']} "
          f"{'ok' if ok else 'WRONG'}")
print()

print("=" * 70)
print("8-bit ripple-carry addition, time-multiplexed on the same six cells")
print("=" * 70)
for a, b, c0 in [(173, 91, 1), (255, 1, 0), (200, 155, 1)]:
    total, carry, _, prog = il.ripple_adder_8bit(a, b, c0)
    resets, imps = prog.census()
    print(f"   {a:3d} + {b:3d} + {c0} = {total:3d} carry {carry} "
          f"(expect {(a + b + c0) & 0xFF} carry {(a + b + c0) >> 8}; "
          f"{resets} resets, {imps} implications)")
print()
print("Each bit reruns the same 35-step program; only the two operand bits")
print("are rewritten, the carry stays latched where the last round left it.")
