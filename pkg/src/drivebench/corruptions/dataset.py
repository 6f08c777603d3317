"""Batch conversion of an image list into a corrupted benchmark set.

The input manifest is a text file with one image path per line (blank
lines and `#` comments are skipped; a lone `path` header line too);
relative paths resolve against the manifest's directory. Every (image,
kind, severity) combination becomes one 8-bit RGB PNG plus one row in
the output manifest; unreadable sources produce error rows and the run
keeps going.
"""

import csv
from pathlib import Path

import numpy as np
from PIL import Image

from .core import CorruptionKind, corrupt

MANIFEST_COLUMNS = ("source", "kind", "severity", "output", "seed", "status")


def load_image(path) -> np.ndarray:
    """Read a PNG/JPEG into an (H, W, 3) float array in [0, 1]."""
    with Image.open(path) as handle:
        rgb = handle.convert("RGB")
        return np.asarray(rgb, dtype=float) / 255.0


def save_image(path, img: np.ndarray) -> None:
    """Quantize to 8-bit RGB and write a PNG."""
    data = np.clip(np.asarray(img, dtype=float), 0.0, 1.0)
    Image.fromarray(np.round(data * 255.0).astype(np.uint8), mode="RGB").save(
        path, format="PNG"
    )


def read_input_manifest(path) -> list:
    """Image paths listed in the manifest, resolved to absolute paths."""
    manifest = Path(path)
    base = manifest.parent
    sources = []
    for line in manifest.read_text().splitlines():
        entry = line.strip()
        if not entry or entry.startswith("#") or entry.lower() == "path":
            continue
        candidate = Path(entry)
        sources.append(candidate if candidate.is_absolute() else base / candidate)
    return sources


def derived_seed(seed: int, image_index: int, kind_index: int, severity: int) -> int:
    """Stable per-output seed, independent across combinations."""
    sequence = np.random.SeedSequence(
        entropy=seed, spawn_key=(image_index, kind_index, severity)
    )
    return int(sequence.generate_state(1)[0])


def corrupt_dataset(input_manifest, output_dir, kinds, severities, seed: int = 0):
    """Produce one corrupted PNG per (input, kind, severity).

    Returns the path of the CSV manifest written into `output_dir`; its
    rows carry (source, kind, severity, output, seed, status) with
    status "ok" or the error that skipped the row.
    """
    kinds = [CorruptionKind(k) for k in kinds]
    severities = [int(s) for s in severities]
    for s in severities:
        if not 0 <= s <= 5:
            raise ValueError(f"severity {s} outside 0..5")
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sources = read_input_manifest(input_manifest)
    kind_order = {k: i for i, k in enumerate(CorruptionKind)}

    rows = []
    for i, source in enumerate(sources):
        try:
            img = load_image(source)
            failure = None
        except (OSError, ValueError) as exc:
            img = None
            failure = f"error: {exc}"
        for kind in kinds:
            for severity in severities:
                row_seed = derived_seed(seed, i, kind_order[kind], severity)
                row = {
                    "source": str(source),
                    "kind": kind.value,
                    "severity": severity,
                    "output": "",
                    "seed": row_seed,
                    "status": "ok",
                }
                if failure is None:
                    name = f"{i:04d}_{Path(source).stem}_{kind.value}_s{severity}.png"
                    out_path = out_dir / name
                    save_image(out_path, corrupt(img, kind, severity, seed=row_seed))
                    row["output"] = str(out_path)
                else:
                    row["status"] = failure
                rows.append(row)

    manifest_path = out_dir / "manifest.csv"
    with open(manifest_path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=MANIFEST_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return manifest_path
