"""Decompose a random graph and inspect the result.

Generates a dense G(n, m), runs the full driver at two recursion depths,
and prints the shape of each decomposition next to the verifier's verdict.
At this size the depth-2 recursion cannot shrink its subproblem and falls
back to the depth-1 path, so the two outputs coincide; they diverge once
n is large enough that (2n)^(1/3) clears the reduced maximum degree.
"""
from shortcycles import EngineConfig, decompose, verify_decomposition
from shortcycles.io import gnm


def main():
    n, m = 512, 15360
    g = gnm(n, m, seed=42)
    print(f"G(n={n}, m={m}), max degree {g.max_degree()}")
    for c in (1, 2):
        dec = decompose(g, EngineConfig(c=c, seed=42))
        rep = verify_decomposition(g, dec, 20 * n, 10 ** 9)
        print(f"\nc={c}:")
        print(f"  cycles           {len(dec.cycles)}")
        print(f"  max cycle length {dec.max_cycle_length()}")
        print(f"  leftover edges   {len(dec.leftover)}  (cap {20 * n})")
        print(f"  coverage         {rep.coverage_fraction:.3f}")
        print(f"  valid            {rep.valid}")
        hist = sorted(rep.length_histogram.items())
        print("  length histogram", " ".join(f"{l}:{k}" for l, k in hist))


if __name__ == "__main__":
    main()
