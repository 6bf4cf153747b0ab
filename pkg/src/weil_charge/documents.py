"""Canonical JSON documents for instances and reports.

One interchange format: UTF-8 JSON with sorted keys and floats printed
with 17 significant digits, so load -> save is byte-stable.  Connection
edges are stored once per undirected edge with tail < head; the sign is
applied on read.  All writes are atomic (temp file + rename).
"""

import json
import math
import os
import tempfile

import numpy as np

from .bundle import ChartAtlas
from .errors import WeilChargeError
from .fields import ConnectionField, SectionField, TwoFormField
from .generators import Instance
from .mesh import build_mesh


class DocumentError(WeilChargeError):
    """Malformed or inconsistent instance/report document."""


# -- canonical serialization ---------------------------------------------------


def _format_value(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise DocumentError(f"non-finite float {x!r} in document")
        if x == 0.0:
            x = 0.0  # normalize -0.0
        out.append(format(x, ".17g"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise DocumentError("document keys must be strings")
            if i:
                out.append(", ")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(": ")
            _format_value(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _format_value(item, out)
        out.append("]")
    else:
        raise DocumentError(f"cannot serialize {type(obj).__name__}")


def canonical_dumps(obj):
    """Canonical JSON text: sorted keys, 17-significant-digit floats."""
    out = []
    _format_value(obj, out)
    out.append("\n")
    return "".join(out)


def write_document(path, obj):
    """Atomically write a canonical JSON document."""
    text = canonical_dumps(obj)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_document(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# -- instance documents ---------------------------------------------------------


def _connection_edges(connection):
    return [[t, h, val] for (t, h), val in connection.items()]


def instance_to_document(instance):
    mesh = instance.mesh
    doc = {
        "mesh": {
            "vertices": mesh.vertices,
            "faces": mesh.faces,
            "corners": sorted(mesh.corner_vertices),
        },
        "meta": instance.meta or {"hbar_convention": "hbar=1"},
    }
    section = instance.section
    if section is not None:
        sec = {"psi": section.psi}
        if section.psi_alt is not None:
            sec["psi_alt"] = section.psi_alt
        if section.face_chart is not None:
            sec["face_chart"] = section.face_chart
        doc["section"] = sec
    if instance.connection is not None:
        doc["connection"] = {"edges": _connection_edges(instance.connection)}
    if instance.twoform is not None:
        doc["twoform"] = {"faces": instance.twoform.omega}
    atlas = instance.atlas
    if atlas is not None:
        charts = []
        for f in range(mesh.num_faces):
            tags = [c for c in (1, 2) if f in atlas.chart_faces(c)]
            charts.append(tags)
        doc["atlas"] = {
            "face_charts": charts,
            "connection_1": _connection_edges(atlas.connection1),
            "connection_2": _connection_edges(atlas.connection2),
            "base_vertex": atlas.base_vertex,
            "anchor_1": atlas.anchor1,
            "anchor_2": atlas.anchor2,
        }
    return doc


def _load_connection(entries, mesh):
    valid = set(mesh.undirected_edges())
    conn = ConnectionField()
    for entry in entries:
        if len(entry) != 3:
            raise DocumentError(f"connection entry {entry!r} is not [tail, head, theta]")
        t, h, val = int(entry[0]), int(entry[1]), float(entry[2])
        if (min(t, h), max(t, h)) not in valid:
            raise DocumentError(f"connection edge ({t}, {h}) is not a mesh edge")
        conn.set(t, h, val)
    return conn


def instance_from_document(doc):
    try:
        mesh_doc = doc["mesh"]
        mesh = build_mesh(
            np.asarray(mesh_doc["vertices"], float),
            np.asarray(mesh_doc["faces"], int),
            mesh_doc.get("corners", ()),
        )
    except KeyError as exc:
        raise DocumentError(f"missing document key: {exc}") from None

    section = None
    if "section" in doc:
        sec = doc["section"]
        psi = np.asarray(sec["psi"], float)
        if psi.shape != (mesh.num_vertices, 2):
            raise DocumentError("section psi length does not match the vertex count")
        psi_alt = sec.get("psi_alt")
        face_chart = sec.get("face_chart")
        if psi_alt is not None and np.asarray(psi_alt).shape != psi.shape:
            raise DocumentError("psi_alt length does not match the vertex count")
        if face_chart is not None and len(face_chart) != mesh.num_faces:
            raise DocumentError("face_chart length does not match the face count")
        section = SectionField(psi, psi_alt, face_chart)

    connection = None
    if "connection" in doc:
        connection = _load_connection(doc["connection"].get("edges", []), mesh)

    twoform = None
    if "twoform" in doc:
        omega = np.asarray(doc["twoform"]["faces"], float)
        if omega.shape != (mesh.num_faces,):
            raise DocumentError("twoform length does not match the face count")
        twoform = TwoFormField(omega)

    atlas = None
    if "atlas" in doc:
        at = doc["atlas"]
        charts = at["face_charts"]
        if len(charts) != mesh.num_faces:
            raise DocumentError("face_charts length does not match the face count")
        chart1 = {f for f, tags in enumerate(charts) if 1 in tags}
        chart2 = {f for f, tags in enumerate(charts) if 2 in tags}
        atlas = ChartAtlas(
            mesh=mesh,
            chart1_faces=frozenset(chart1),
            chart2_faces=frozenset(chart2),
            connection1=_load_connection(at["connection_1"], mesh),
            connection2=_load_connection(at["connection_2"], mesh),
            base_vertex=int(at.get("base_vertex", 0)),
            anchor1=int(at.get("anchor_1", 0)),
            anchor2=int(at.get("anchor_2", 0)),
        )

    return Instance(
        mesh=mesh,
        section=section,
        connection=connection,
        twoform=twoform,
        atlas=atlas,
        meta=doc.get("meta", {}),
    )


def save_instance(path, instance):
    write_document(path, instance_to_document(instance))


def load_instance(path):
    return instance_from_document(read_document(path))
