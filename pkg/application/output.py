"""CSV and JSON writers for samples, density tables and reports.

CSV files start with '#'-prefixed metadata lines (one key=value each,
values JSON-encoded); JSON files carry the same metadata under "config".
"""
import csv
import io
import json

import numpy as np


def _dumps(value):
    return json.dumps(value, sort_keys=True, default=_plain)


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def metadata_lines(config):
    return [f"# {key}={_dumps(config[key])}" for key in sorted(config)]


def _csv(config, header, rows):
    buffer = io.StringIO()
    buffer.writelines(line + "\n" for line in metadata_lines(config))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def read_metadata(lines):
    meta = {}
    for line in lines:
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition("=")
        meta[key] = json.loads(value)
    return meta


def samples_csv(samples, config):
    return _csv({**config, **samples.header()}, ["sigma"],
                ([value] for value in samples.values.tolist()))


def samples_json(samples, config, summary=None):
    return _dumps({"config": {**config, **samples.header()},
                   "summary": summary or {},
                   "values": samples.values.tolist()}) + "\n"


def summary_json(config, summary):
    return _dumps({"config": config, "summary": summary}) + "\n"


def density_csv(curve, cdf, config):
    meta = {**config, **curve.config, "left_mass": curve.left_mass,
            "tail_mass": curve.tail_mass, "total_mass": curve.total_mass,
            "truncation_error": curve.truncation_error}
    return _csv(meta, ["y", "pdf", "cdf"],
                zip(curve.grid.tolist(), curve.values.tolist(),
                    cdf.values.tolist()))


def density_json(curve, cdf, config):
    return _dumps({"config": {**config, **curve.config},
                   "left_mass": curve.left_mass,
                   "tail_mass": curve.tail_mass,
                   "total_mass": curve.total_mass,
                   "truncation_error": curve.truncation_error,
                   "y": curve.grid.tolist(), "pdf": curve.values.tolist(),
                   "cdf": cdf.values.tolist()}) + "\n"


def transform_csv(rows, config):
    return _csv(config, ["s", "re", "im"],
                ((s, value.real, value.imag) for s, value in rows))


def transform_json(rows, config):
    return _dumps({"config": config,
                   "values": [{"s": s, "re": value.real, "im": value.imag}
                              for s, value in rows]}) + "\n"


def reports_json(reports, config=None):
    return _dumps({"config": config or {},
                   "reports": [report.as_dict() for report in reports]}) \
        + "\n"


def reports_table(reports):
    rows = [("check", "statistic", "threshold", "n", "verdict")]
    for report in reports:
        rows.append((report.name, f"{report.statistic:.4e}",
                     f"{report.threshold:.4e}", str(report.n_samples),
                     "pass" if report.passed else "FAIL"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(width)
                               for cell, width in zip(row, widths)).rstrip()
                     for row in rows) + "\n"
