"""Regenerate the frozen oracle fixtures under data/.

Requires RDKit and ScaffoldGraph. The outputs are committed; this script only
documents how they were produced.
"""
import csv
import os
import random

from rdkit import Chem, RDLogger
from rdkit.Chem.Scaffolds import MurckoScaffold
from scaffoldgraph.core import get_murcko_scaffold, get_next_murcko_fragments

RDLogger.DisableLog("rdApp.*")

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")
RDKIT = os.path.dirname(Chem.__file__)[: -len("/Chem")]
SUPPORTED = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "H", "Si", "Se", "As"}


def desk_corpus():
    src = os.path.join(RDKIT, "Data", "Pains", "test_data", "wehi_mols.csv")
    rows = []
    with open(src) as fh:
        for smi, ident in csv.reader(fh):
            rows.append((smi, ident))
    with open(os.path.join(DATA, "desk_10k.smi"), "w") as out:
        out.write("# WEHI screening compounds, from the RDKit PAINS test data (BSD-3-Clause)\n")
        for smi, ident in rows:
            out.write(f"{smi}\t{ident}\n")
    return rows


def curated(smi):
    """Molecules whose written aromaticity equals RDKit's perception."""
    raw = Chem.MolFromSmiles(smi, sanitize=False)
    mol = Chem.MolFromSmiles(smi)
    if raw is None or mol is None:
        return None
    if len(Chem.GetMolFrags(mol)) != 1:
        return None
    if any(a.GetSymbol() not in SUPPORTED for a in mol.GetAtoms()):
        return None
    if any(a.GetIsotope() for a in mol.GetAtoms()):
        return None
    written = {a.GetIdx() for a in raw.GetAtoms() if a.GetIsAromatic()}
    perceived = {a.GetIdx() for a in mol.GetAtoms() if a.GetIsAromatic()}
    if written != perceived:
        return None
    return mol


def main():
    rows = desk_corpus()
    picked = []
    for smi, ident in rows:
        mol = curated(smi)
        if mol is not None:
            picked.append((smi, ident, mol))
    step = len(picked) / 1000.0
    subset = [picked[int(i * step)] for i in range(1000)]
    with open(os.path.join(DATA, "murcko_oracle_1000.tsv"), "w") as out:
        out.write("# input_smiles\treference_scaffold\tid\n")
        for smi, ident, mol in subset:
            scaf = Chem.MolToSmiles(MurckoScaffold.GetScaffoldForMol(mol))
            out.write(f"{smi}\t{scaf}\t{ident}\n")

    rng = random.Random(7)
    with open(os.path.join(DATA, "rdkit_renderings.tsv"), "w") as out:
        out.write("# input_smiles\tfive randomized renderings (tab separated)\n")
        for smi, ident, mol in subset[:300]:
            renders = []
            for _ in range(5):
                Chem.rdBase.SeedRandomNumberGenerator(rng.randrange(1 << 30))
                renders.append(Chem.MolToSmiles(mol, doRandom=True, canonical=False))
            out.write(smi + "\t" + "\t".join(renders) + "\n")

    seen = set()
    with open(os.path.join(DATA, "fragment_oracle.tsv"), "w") as out:
        out.write("# scaffold\tnext-level fragments (space separated)\n")
        for smi, ident, mol in subset:
            scaf = get_murcko_scaffold(mol)
            key = Chem.MolToSmiles(scaf)
            nrings = scaf.GetRingInfo().NumRings()
            if key in seen or not (2 <= nrings <= 4):
                continue
            seen.add(key)
            frags = sorted({Chem.MolToSmiles(f) for f in get_next_murcko_fragments(scaf)})
            out.write(key + "\t" + " ".join(frags) + "\n")
            if len(seen) >= 300:
                break


if __name__ == "__main__":
    main()
