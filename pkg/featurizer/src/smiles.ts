// Minimal SMILES parser covering the organic subset plus bracket atoms,
// branches, ring closures (including %nn), and aromatic lowercase notation.
// Produces a molecular graph suitable for circular-fingerprint invariants;
// stereochemistry markers are accepted and ignored.

export type BondType = "single" | "double" | "triple" | "aromatic";

export interface Atom {
  id: number;
  element: string;
  atomicNumber: number;
  aromatic: boolean;
  charge: number;
  isotope: number;
  explicitH: number | null; // bracket-specified hydrogen count, else null
  hydrogens: number; // resolved total hydrogen count
  inRing: boolean;
}

export interface Bond {
  atom1: number;
  atom2: number;
  type: BondType;
}

export interface Molecule {
  atoms: Atom[];
  bonds: Bond[];
}

export class SmilesError extends Error {}

const ATOMIC_NUMBERS: Record<string, number> = {
  H: 1, B: 5, C: 6, N: 7, O: 8, F: 9, Si: 14, P: 15, S: 16, Cl: 17,
  As: 33, Se: 34, Br: 35, I: 53,
};

// Standard valences used to infer implicit hydrogens for organic-subset atoms.
const DEFAULT_VALENCES: Record<string, number[]> = {
  B: [3], C: [4], N: [3, 5], O: [2], P: [3, 5], S: [2, 4, 6],
  F: [1], Cl: [1], Br: [1], I: [1],
};

const ORGANIC_SUBSET = new Set(["B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"]);
const AROMATIC_ELEMENTS = new Set(["b", "c", "n", "o", "p", "s", "se", "as"]);

function bondOrder(type: BondType): number {
  switch (type) {
    case "single": return 1;
    case "double": return 2;
    case "triple": return 3;
    case "aromatic": return 1.5;
  }
}

interface PendingRing {
  atom: number;
  bond: BondType | null;
}

export function parseSmiles(smiles: string): Molecule {
  if (!smiles || smiles.trim() === "") {
    throw new SmilesError("empty SMILES string");
  }
  const s = smiles.trim();
  const atoms: Atom[] = [];
  const bonds: Bond[] = [];
  const stack: number[] = [];
  const openRings = new Map<number, PendingRing>();
  let prev: number | null = null;
  let pendingBond: BondType | null = null;
  let i = 0;

  const addAtom = (
    element: string,
    aromatic: boolean,
    charge: number,
    isotope: number,
    explicitH: number | null,
  ): number => {
    const key = element === "Cl" || element === "Br" ? element : element[0]!.toUpperCase() + element.slice(1);
    const atomicNumber = ATOMIC_NUMBERS[key];
    if (atomicNumber === undefined) {
      throw new SmilesError(`unknown element '${element}' at position ${i}`);
    }
    atoms.push({
      id: atoms.length,
      element: key,
      atomicNumber,
      aromatic,
      charge,
      isotope,
      explicitH,
      hydrogens: 0,
      inRing: false,
    });
    return atoms.length - 1;
  };

  const connect = (a: number, b: number, explicit: BondType | null) => {
    let type: BondType;
    if (explicit !== null) {
      type = explicit;
    } else if (atoms[a]!.aromatic && atoms[b]!.aromatic) {
      type = "aromatic";
    } else {
      type = "single";
    }
    bonds.push({ atom1: a, atom2: b, type });
  };

  const handleRingDigit = (digit: number, bond: BondType | null) => {
    if (prev === null) {
      throw new SmilesError(`ring closure before any atom at position ${i}`);
    }
    const open = openRings.get(digit);
    if (open === undefined) {
      openRings.set(digit, { atom: prev, bond });
    } else {
      if (open.atom === prev) {
        throw new SmilesError(`ring bond ${digit} closes onto its own atom`);
      }
      connect(open.atom, prev, bond ?? open.bond);
      openRings.delete(digit);
    }
  };

  while (i < s.length) {
    const ch = s[i]!;
    if (ch === "-") { pendingBond = "single"; i++; continue; }
    if (ch === "=") { pendingBond = "double"; i++; continue; }
    if (ch === "#") { pendingBond = "triple"; i++; continue; }
    if (ch === ":") { pendingBond = "aromatic"; i++; continue; }
    if (ch === "/" || ch === "\\") { i++; continue; } // stereo bonds -> single
    if (ch === "(") {
      if (prev === null) throw new SmilesError("branch before any atom");
      stack.push(prev);
      i++;
      continue;
    }
    if (ch === ")") {
      const back = stack.pop();
      if (back === undefined) throw new SmilesError(`unmatched ')' at position ${i}`);
      prev = back;
      i++;
      continue;
    }
    if (ch === ".") {
      // Disconnected component separator; keep parsing into the same graph.
      prev = null;
      pendingBond = null;
      i++;
      continue;
    }
    if (ch >= "0" && ch <= "9") {
      handleRingDigit(Number(ch), pendingBond);
      pendingBond = null;
      i++;
      continue;
    }
    if (ch === "%") {
      const two = s.slice(i + 1, i + 3);
      if (!/^\d\d$/.test(two)) {
        throw new SmilesError(`bad %nn ring closure at position ${i}`);
      }
      handleRingDigit(Number(two), pendingBond);
      pendingBond = null;
      i += 3;
      continue;
    }
    let idx: number;
    if (ch === "[") {
      const close = s.indexOf("]", i);
      if (close < 0) throw new SmilesError(`unclosed '[' at position ${i}`);
      idx = parseBracketAtom(s.slice(i + 1, close), addAtom);
      i = close + 1;
    } else {
      // Organic subset: two-letter halogens first, then single letters.
      let element: string | null = null;
      let aromatic = false;
      const two = s.slice(i, i + 2);
      if (two === "Cl" || two === "Br") {
        element = two;
        i += 2;
      } else if ("BCNOPSFI".includes(ch)) {
        element = ch;
        i += 1;
      } else if (AROMATIC_ELEMENTS.has(ch)) {
        element = ch.toUpperCase();
        aromatic = true;
        i += 1;
      } else {
        throw new SmilesError(`unexpected character '${ch}' at position ${i}`);
      }
      if (!ORGANIC_SUBSET.has(element)) {
        throw new SmilesError(`element '${element}' needs brackets at position ${i}`);
      }
      idx = addAtom(element, aromatic, 0, 0, null);
    }
    if (prev !== null) {
      connect(prev, idx, pendingBond);
    }
    prev = idx;
    pendingBond = null;
  }

  if (stack.length > 0) throw new SmilesError("unmatched '(' in SMILES");
  if (openRings.size > 0) {
    throw new SmilesError(`unclosed ring bond(s): ${[...openRings.keys()].join(", ")}`);
  }
  if (atoms.length === 0) throw new SmilesError("SMILES contains no atoms");

  assignRingMembership(atoms, bonds);
  assignHydrogens(atoms, bonds);
  return { atoms, bonds };
}

type AddAtom = (
  element: string,
  aromatic: boolean,
  charge: number,
  isotope: number,
  explicitH: number | null,
) => number;

function parseBracketAtom(body: string, addAtom: AddAtom): number {
  // [isotope? element chirality? Hcount? charge?]
  const match = body.match(
    /^(\d+)?([A-Z][a-z]?|[a-z]{1,2})(@{1,2})?(H\d*)?([+-]\d*|[+]+|[-]+)?$/,
  );
  if (!match) throw new SmilesError(`cannot parse bracket atom '[${body}]'`);
  const [, isotopeStr, elementRaw, , hPart, chargePart] = match;
  const aromatic = elementRaw === elementRaw!.toLowerCase();
  const element = aromatic
    ? elementRaw![0]!.toUpperCase() + elementRaw!.slice(1)
    : elementRaw!;
  if (aromatic && !AROMATIC_ELEMENTS.has(elementRaw!)) {
    throw new SmilesError(`'${elementRaw}' cannot be aromatic`);
  }
  let explicitH = 0;
  if (hPart) explicitH = hPart.length === 1 ? 1 : Number(hPart.slice(1));
  let charge = 0;
  if (chargePart) {
    if (/^\++$/.test(chargePart)) charge = chargePart.length;
    else if (/^-+$/.test(chargePart)) charge = -chargePart.length;
    else charge = Number(chargePart) || (chargePart[0] === "+" ? 1 : -1);
  }
  const isotope = isotopeStr ? Number(isotopeStr) : 0;
  return addAtom(element, aromatic, charge, isotope, explicitH);
}

function assignRingMembership(atoms: Atom[], bonds: Bond[]): void {
  // A bond is a ring bond iff removing it keeps its endpoints connected.
  const adjacency: number[][] = atoms.map(() => []);
  bonds.forEach((b, bi) => {
    adjacency[b.atom1]!.push(bi);
    adjacency[b.atom2]!.push(bi);
  });
  const reachableWithout = (skip: number, from: number, to: number): boolean => {
    const seen = new Set([from]);
    const queue = [from];
    while (queue.length > 0) {
      const a = queue.pop()!;
      if (a === to) return true;
      for (const bi of adjacency[a]!) {
        if (bi === skip) continue;
        const bond = bonds[bi]!;
        const next = bond.atom1 === a ? bond.atom2 : bond.atom1;
        if (!seen.has(next)) {
          seen.add(next);
          queue.push(next);
        }
      }
    }
    return false;
  };
  bonds.forEach((b, bi) => {
    if (reachableWithout(bi, b.atom1, b.atom2)) {
      atoms[b.atom1]!.inRing = true;
      atoms[b.atom2]!.inRing = true;
    }
  });
}

function assignHydrogens(atoms: Atom[], bonds: Bond[]): void {
  const orderSum = atoms.map(() => 0);
  for (const b of bonds) {
    const order = bondOrder(b.type);
    orderSum[b.atom1]! += order;
    orderSum[b.atom2]! += order;
  }
  for (const atom of atoms) {
    if (atom.explicitH !== null) {
      atom.hydrogens = atom.explicitH;
      continue;
    }
    const valences = DEFAULT_VALENCES[atom.element];
    if (!valences) {
      atom.hydrogens = 0;
      continue;
    }
    // Aromatic order sums are fractional; round up so e.g. benzene carbons
    // (2 aromatic bonds = 3.0) get exactly one hydrogen.
    const used = Math.ceil(orderSum[atom.id]! - 1e-9) - atom.charge * 0;
    const target = valences.find((v) => v >= used);
    atom.hydrogens = target === undefined ? 0 : Math.max(0, target - used);
  }
}
