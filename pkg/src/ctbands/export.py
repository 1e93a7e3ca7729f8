"""CSV / JSON writers for band grids, histograms, scans and spectra."""
import csv
import io
import json

BAND_HEADER = ("k_x", "k_y", "sector", "eps0", "eps_re", "eps_im")
DOS_HEADER = ("eps_center", "density")
SCAN_HEADER = ("gamma", "fully_real", "n_broken")


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def band_grid_csv(grid, full=False):
    return _csv_text(BAND_HEADER, grid.rows(full=full))


def rice_mele_bands_csv(k, eps0, eps, full=False):
    rows = []
    for kk, e0, e in zip(k, eps0, eps):
        rows.append((float(kk), "+", float(e0), float(e.real), float(e.imag)))
        if full:
            rows.append((float(kk), "-", float(-e0), float(-e.real), float(-e.imag)))
    return _csv_text(("k", "sector", "eps0", "eps_re", "eps_im"), rows)


def dos_csv(hist):
    return _csv_text(DOS_HEADER, zip(map(float, hist.centers), map(float, hist.density)))


def dos_sidecar(hist):
    return json.dumps(hist.params, indent=1, sort_keys=True) + "\n"


def scan_csv(points):
    return _csv_text(SCAN_HEADER, ((p.gamma, int(p.fully_real), p.n_broken) for p in points))


def spectrum_json(report, vectors=False):
    return json.dumps(report.to_dict(vectors=vectors), indent=1) + "\n"


def spectrum_csv(report):
    rows = []
    for idx, p in enumerate(report.pairs):
        for branch, e in zip("+-", p.eigenvalues):
            rows.append((idx, float(p.epsilon0), branch, float(e.real), float(e.imag), int(p.broken)))
    return _csv_text(("channel", "epsilon0", "branch", "eps_re", "eps_im", "broken"), rows)
