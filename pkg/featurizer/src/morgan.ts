// Hashed circular (Morgan/ECFP-style) fingerprints over the parsed
// molecular graph. Radius 2 with 2048 bits reproduces the common ECFP4
// setup. The bit mapping is specific to this implementation's hash; only
// within-implementation determinism is promised.

import type { Bond, BondType, Molecule } from "./smiles.js";

// 32-bit hash combiner (the boost::hash_combine recipe).
function hashCombine(seed: number, value: number): number {
  let hash = seed >>> 0;
  hash ^= ((value >>> 0) + 0x9e3779b9 + (hash << 6) + (hash >>> 2)) >>> 0;
  return hash >>> 0;
}

function hashComponents(components: number[]): number {
  let hash = 0;
  for (const c of components) {
    hash = hashCombine(hash, c);
  }
  return hash;
}

function bondInvariant(type: BondType): number {
  switch (type) {
    case "single": return 1;
    case "double": return 2;
    case "triple": return 3;
    case "aromatic": return 12;
  }
}

function initialInvariant(mol: Molecule, atomIdx: number, degree: number): number {
  const atom = mol.atoms[atomIdx]!;
  return hashComponents([
    atom.atomicNumber,
    degree,
    atom.hydrogens,
    atom.charge + 16, // shift so negative charges stay in uint32 space
    atom.isotope,
    atom.inRing ? 1 : 0,
    atom.aromatic ? 1 : 0,
  ]);
}

/**
 * Computes the set-bit indices of a hashed circular fingerprint.
 *
 * Every atom environment from radius 0 up to `radius` contributes one
 * hashed identifier, folded into [0, nBits) by modulo. Returned indices
 * are deduplicated and ascending, matching the dataset format's row
 * invariant.
 */
export function morganBits(mol: Molecule, radius = 2, nBits = 2048): number[] {
  if (radius < 0 || !Number.isInteger(radius)) {
    throw new Error(`radius must be a non-negative integer, got ${radius}`);
  }
  if (nBits < 1 || !Number.isInteger(nBits)) {
    throw new Error(`nBits must be a positive integer, got ${nBits}`);
  }

  const neighbors: { bond: Bond; other: number }[][] = mol.atoms.map(() => []);
  for (const bond of mol.bonds) {
    neighbors[bond.atom1]!.push({ bond, other: bond.atom2 });
    neighbors[bond.atom2]!.push({ bond, other: bond.atom1 });
  }

  let current = mol.atoms.map((_, i) =>
    initialInvariant(mol, i, neighbors[i]!.length),
  );
  const identifiers = new Set<number>(current);

  for (let layer = 1; layer <= radius; layer++) {
    const next: number[] = new Array(mol.atoms.length);
    for (let i = 0; i < mol.atoms.length; i++) {
      const pairs = neighbors[i]!
        .map(({ bond, other }) => [bondInvariant(bond.type), current[other]!])
        .sort((a, b) => (a[1]! !== b[1]! ? a[1]! - b[1]! : a[0]! - b[0]!));
      let invariant = hashCombine(layer, current[i]!);
      for (const [bondInv, neighborInv] of pairs) {
        invariant = hashCombine(invariant, hashCombine(bondInv!, neighborInv!));
      }
      next[i] = invariant;
      identifiers.add(invariant);
    }
    current = next;
  }

  const bits = new Set<number>();
  for (const id of identifiers) {
    bits.add(id % nBits);
  }
  return [...bits].sort((a, b) => a - b);
}
