"""Reading and writing graph datasets (IAM-style GXL collections and native JSONL)."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable
from xml.parsers import expat

from .graph import Composite, GraphError, LabeledGraph, RealVector, Symbol, label_kind

SPLITS = ("train", "validation", "test")


class ParseError(ValueError):
    pass


class DatasetError(ValueError):
    pass


Sample = tuple[LabeledGraph, str]


@dataclass(frozen=True)
class Dataset:
    train: tuple[Sample, ...]
    validation: tuple[Sample, ...]
    test: tuple[Sample, ...]
    class_set: tuple[str, ...]

    def __post_init__(self):
        for name in SPLITS:
            object.__setattr__(self, name, tuple(getattr(self, name)))
        known = set(self.class_set)
        for name in SPLITS:
            bad = {c for _, c in getattr(self, name) if c not in known}
            if bad:
                raise DatasetError(f"{name} split uses classes {sorted(bad)} missing from the class set")

    @classmethod
    def from_splits(cls, train, validation, test) -> "Dataset":
        classes = dict.fromkeys(c for split in (train, validation, test) for _, c in split)
        return cls(tuple(train), tuple(validation), tuple(test), tuple(classes))

    def split(self, name: str) -> tuple[Sample, ...]:
        if name not in SPLITS:
            raise KeyError(f"unknown split {name!r}")
        return getattr(self, name)


# -- GXL ------------------------------------------------------------------------

class _Element:
    __slots__ = ("tag", "attrib", "children", "text", "line")

    def __init__(self, tag, attrib, line):
        self.tag, self.attrib, self.line = tag, attrib, line
        self.children: list[_Element] = []
        self.text = ""


def _parse_xml(data: bytes) -> _Element:
    parser = expat.ParserCreate()
    stack: list[_Element] = []
    root: list[_Element] = []

    def start(tag, attrib):
        el = _Element(tag, attrib, parser.CurrentLineNumber)
        if stack:
            stack[-1].children.append(el)
        else:
            root.append(el)
        stack.append(el)

    def end(tag):
        stack.pop()

    def chars(text):
        if stack:
            stack[-1].text += text

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise ParseError(f"malformed XML at line {exc.lineno}, column {exc.offset}: "
                         f"{expat.ErrorString(exc.code)}") from None
    return root[0]


def _attr_value(attr: _Element):
    values = [c for c in attr.children]
    if len(values) != 1:
        raise ParseError(f"line {attr.line}: attr {attr.attrib.get('name')!r} must hold exactly one value")
    v = values[0]
    text = v.text.strip()
    try:
        if v.tag == "float":
            return "float", float(text)
        if v.tag == "int":
            return "int", int(text)
    except ValueError:
        raise ParseError(f"line {v.line}: bad {v.tag} value {text!r}") from None
    if v.tag == "string":
        return "string", text
    raise ParseError(f"line {v.line}: unsupported attribute type <{v.tag}>")


def _scalar_label(kind, value):
    if kind == "string":
        return Symbol(value)
    if kind == "int":
        return Symbol(str(value))
    return RealVector((value,))


def _attrs_to_label(el: _Element):
    attrs = {}
    for child in el.children:
        if child.tag != "attr":
            continue
        name = child.attrib.get("name")
        if not name:
            raise ParseError(f"line {child.line}: attr without a name")
        attrs[name] = _attr_value(child)
    if not attrs:
        return None
    coords = None
    if "x" in attrs and "y" in attrs and attrs["x"][0] == attrs["y"][0] == "float":
        coords = RealVector((attrs.pop("x")[1], attrs.pop("y")[1]))
        if not attrs:
            return coords
    if coords is None and len(attrs) == 1:
        (kind, value), = attrs.values()
        return _scalar_label(kind, value)
    parts = [(name, _scalar_label(kind, value)) for name, (kind, value) in attrs.items()]
    if coords is not None:
        parts.insert(0, ("xy", coords))
    return Composite(tuple(parts))


def parse_gxl(document) -> LabeledGraph:
    """Parse one GXL graph from bytes, text or a file path."""
    if isinstance(document, (str, os.PathLike)) and not str(document).lstrip().startswith("<"):
        data = Path(document).read_bytes()
    elif isinstance(document, str):
        data = document.encode("utf-8")
    else:
        data = bytes(document)
    root = _parse_xml(data)
    graphs = [root] if root.tag == "graph" else [c for c in root.children if c.tag == "graph"]
    if len(graphs) != 1:
        raise ParseError(f"expected exactly one <graph> element, found {len(graphs)}")
    g = graphs[0]
    if g.attrib.get("edgemode", "undirected") != "undirected":
        raise ParseError(f"line {g.line}: only undirected graphs are supported")
    index: dict[str, int] = {}
    vertices = []
    edges = []
    for child in g.children:
        if child.tag == "node":
            nid = child.attrib.get("id")
            if nid is None:
                raise ParseError(f"line {child.line}: node without id")
            if nid in index:
                raise ParseError(f"line {child.line}: duplicate node id {nid!r}")
            index[nid] = len(vertices)
            label = _attrs_to_label(child)
            vertices.append(label if label is not None else Symbol(""))
    for child in g.children:
        if child.tag == "edge":
            ends = []
            for key in ("from", "to"):
                ref = child.attrib.get(key)
                if ref not in index:
                    raise ParseError(f"line {child.line}: edge references undeclared node id {ref!r}")
                ends.append(index[ref])
            edges.append((ends[0], ends[1], _attrs_to_label(child)))
    try:
        return LabeledGraph(tuple(vertices), tuple(edges), g.attrib.get("id", ""))
    except GraphError as exc:
        raise ParseError(str(exc)) from None


# -- native format -----------------------------------------------------------------

def label_to_json(label):
    if label is None:
        return None
    if isinstance(label, RealVector):
        return {"real": list(label.values)}
    if isinstance(label, Symbol):
        return {"symbol": label.token}
    if isinstance(label, Composite):
        return {"composite": {name: label_to_json(sub) for name, sub in label.parts}}
    raise TypeError(f"cannot serialize label of kind {label_kind(label)}")


def label_from_json(obj):
    if obj is None:
        return None
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError(f"bad label object {obj!r}")
    (kind, value), = obj.items()
    if kind == "real":
        return RealVector(tuple(value))
    if kind == "symbol":
        return Symbol(str(value))
    if kind == "composite":
        return Composite(tuple((name, label_from_json(sub)) for name, sub in value.items()))
    raise ParseError(f"unknown label kind {kind!r}")


def graph_to_json(g: LabeledGraph, label: str | None = None) -> dict:
    obj = {"id": g.id}
    if label is not None:
        obj["class"] = label
    obj["vertices"] = [label_to_json(v) for v in g.vertices]
    obj["edges"] = [[u, v] if lab is None else [u, v, label_to_json(lab)] for u, v, lab in g.edges]
    return obj


def graph_from_json(obj: dict) -> LabeledGraph:
    try:
        vertices = tuple(label_from_json(v) for v in obj["vertices"])
        edges = tuple((e[0], e[1], label_from_json(e[2]) if len(e) > 2 else None) for e in obj["edges"])
        return LabeledGraph(vertices, edges, str(obj.get("id", "")))
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"malformed graph record: {exc}") from None
    except GraphError as exc:
        raise ParseError(str(exc)) from None


def read_native(path) -> list[Sample]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: {exc.msg}") from None
            label = obj.get("class")
            if not isinstance(label, str) or not label:
                raise ParseError(f"{path}:{lineno}: missing or empty class label")
            try:
                out.append((graph_from_json(obj), label))
            except ParseError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    return out


def write_native(samples: Iterable[Sample], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for g, label in samples:
            fh.write(json.dumps(graph_to_json(g, label), separators=(",", ":")) + "\n")


# -- manifests ----------------------------------------------------------------------

def _read_split_manifest(path: Path) -> list[tuple[Path, str]]:
    """Lines of ``<graph-file> <class-label>``; IAM ``.cxl`` files are accepted too."""
    if path.suffix.lower() in (".cxl", ".xml"):
        root = _parse_xml(path.read_bytes())
        entries = []
        stack = [root]
        while stack:
            el = stack.pop(0)
            if el.tag == "print":
                entries.append((path.parent / el.attrib["file"], el.attrib["class"]))
            stack[:0] = el.children
        return entries
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise DatasetError(f"{path}:{lineno}: expected '<graph-file> <class-label>'")
        entries.append((path.parent / parts[0], parts[1].strip()))
    return entries


def read_manifest(manifest_path) -> dict[str, Path]:
    """Dataset manifest: one ``<split> <path>`` line per split."""
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise DatasetError(f"manifest {manifest_path} not found")
    splits = {}
    for lineno, line in enumerate(manifest_path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        if len(parts) != 2 or parts[0] not in SPLITS:
            raise DatasetError(f"{manifest_path}:{lineno}: expected '<train|validation|test> <path>'")
        splits[parts[0]] = manifest_path.parent / parts[1].strip()
    missing = [s for s in SPLITS if s not in splits]
    if missing:
        raise DatasetError(f"{manifest_path}: missing splits {missing}")
    return splits


def load_dataset(manifest_path, format: str = "native") -> Dataset:
    splits = read_manifest(manifest_path)
    loaded = {}
    for name, path in splits.items():
        if not path.is_file():
            raise DatasetError(f"{name} split file {path} not found")
        if format == "native":
            samples = read_native(path)
        elif format == "gxl-collection":
            samples = []
            for gpath, label in _read_split_manifest(path):
                if not gpath.is_file():
                    raise DatasetError(f"graph file {gpath} listed in {path} not found")
                try:
                    samples.append((parse_gxl(gpath.read_bytes()), label))
                except ParseError as exc:
                    raise ParseError(f"{gpath}: {exc}") from None
        else:
            raise DatasetError(f"unknown dataset format {format!r}")
        if not samples:
            raise DatasetError(f"{name} split ({path}) is empty")
        loaded[name] = samples
    train_classes = {c for _, c in loaded["train"]}
    for name in ("validation", "test"):
        unknown = sorted({c for _, c in loaded[name]} - train_classes)
        if unknown:
            raise DatasetError(f"{name} split references classes {unknown} absent from training")
    return Dataset.from_splits(loaded["train"], loaded["validation"], loaded["test"])


def write_dataset(dataset: Dataset, manifest_path) -> list[Path]:
    """Write a native dataset: the manifest plus one JSONL file per split beside it."""
    manifest_path = Path(manifest_path)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    stem = manifest_path.stem
    written = []
    lines = []
    for name in SPLITS:
        fname = f"{stem}.{name}.jsonl"
        write_native(dataset.split(name), manifest_path.parent / fname)
        written.append(manifest_path.parent / fname)
        lines.append(f"{name} {fname}\n")
    manifest_path.write_text("".join(lines), encoding="utf-8")
    return [manifest_path, *written]
