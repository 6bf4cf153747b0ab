"""Static SVG overlay: mesh outline, vortex markers, boundary annotations.

Planar meshes are drawn in their xy coordinates; non-planar meshes are
flattened with a Lambert azimuthal projection from the +z pole.  Vortices
are colored by Brouwer degree and sized by Hopf index; boundary loops are
annotated with their phase winding when a report is supplied.
"""

import numpy as np


def _project(vertices):
    v = np.asarray(vertices, float)
    extent = max(np.ptp(v[:, 0]), np.ptp(v[:, 1]), 1e-30)
    if np.ptp(v[:, 2]) < 1e-9 * extent:
        return v[:, :2].copy()
    radius = np.linalg.norm(v, axis=1)
    radius[radius == 0] = 1.0
    p = v / radius[:, None]
    # Lambert azimuthal equal-area from the +z pole, clamped near -z
    denom = np.sqrt(np.maximum(2.0 / np.maximum(1.0 + p[:, 2], 1e-6), 0.0))
    return np.column_stack([p[:, 0] * denom, p[:, 1] * denom])


def _project_point(point, vertices):
    stack = np.vstack([np.asarray(vertices, float), np.asarray(point, float)])
    return _project(stack)[-1]


def render_svg(mesh, report=None, size=640):
    """Render the mesh (and optional census/identity report) as an SVG string."""
    xy = _project(mesh.vertices)
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    span = max(float((hi - lo).max()), 1e-30)
    margin = 0.06 * size

    def to_px(p):
        q = (p - lo) / span
        return (margin + q[0] * (size - 2 * margin),
                size - margin - q[1] * (size - 2 * margin))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    seen = set()
    lines = []
    for f in range(mesh.num_faces):
        for t, h in mesh.face_edges(f):
            key = (min(t, h), max(t, h))
            if key in seen:
                continue
            seen.add(key)
            x1, y1 = to_px(xy[t])
            x2, y2 = to_px(xy[h])
            lines.append(
                f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}"/>'
            )
    parts.append('<g stroke="#c8c8c8" stroke-width="0.6">' + "".join(lines) + "</g>")

    boundary_info = {}
    vortices = []
    if report:
        for trace in report.get("boundary", []):
            boundary_info[trace["loop"]] = trace.get("winding", 0)
        vortices = report.get("census", {}).get("vortices", [])

    for i, loop in enumerate(mesh.boundary_loops):
        points = " ".join(
            "{:.2f},{:.2f}".format(*to_px(xy[t])) for t, _ in loop.edges
        )
        parts.append(
            f'<polygon points="{points}" fill="none" stroke="#303030" stroke-width="1.6"/>'
        )
        anchor = to_px(xy[loop.vertices[0]])
        label = f"loop {i}"
        if i in boundary_info:
            label += f": l = {boundary_info[i]}"
        parts.append(
            f'<text x="{anchor[0]:.2f}" y="{anchor[1] - 6:.2f}" '
            f'font-size="13" fill="#303030">{label}</text>'
        )

    for v in vortices:
        pos = _project_point(v["position"], mesh.vertices)
        x, y = to_px(pos)
        color = "#d62728" if v["brouwer_degree"] > 0 else "#1f77b4"
        r = 4 + 3 * (v["hopf_index"] - 1)
        parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{color}" '
            f'fill-opacity="0.85" stroke="black" stroke-width="0.8"/>'
        )
        parts.append(
            f'<text x="{x + r + 2:.2f}" y="{y + 4:.2f}" font-size="12">'
            f'{v["winding"]:+d}</text>'
        )
    parts.append("</svg>\n")
    return "\n".join(parts)


def save_svg(path, mesh, report=None, size=640):
    import os
    import tempfile

    text = render_svg(mesh, report, size)
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
