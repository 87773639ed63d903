"""Independent implementation of the fallback embedder: byte trigrams of
" " + lowercase(text) + " " hashed with FNV-1a into `dim` buckets, counted,
then L2-normalized."""

import math
import sys

MASK = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


def embed(text: str, dim: int = 256):
    padded = (" " + text.lower() + " ").encode("utf-8")
    v = [0.0] * dim
    for i in range(len(padded) - 2):
        v[fnv1a64(padded[i:i + 3]) % dim] += 1.0
    norm = math.sqrt(sum(x * x for x in v))
    return [x / norm for x in v]


def cosine(a, b):
    return sum(x * y for x, y in zip(a, b))


def main():
    a = embed("Natalia sold clips to 48 of her friends in April.")
    b = embed("What is the boiling point of water at sea level?")
    print("cosine =", repr(cosine(a, b)))
    print("nonzero buckets a =", sum(1 for x in a if x))
    return 0


if __name__ == "__main__":
    sys.exit(main())
