"""key = value configuration files.

Lines are ``key = value``; ``#`` starts a comment; ``[section]`` headers
prefix the following keys as ``section.key``. Values are parsed as JSON
scalars when possible (numbers, true/false, quoted strings), else kept as
bare strings.
"""

import json
import os

ENV_VAR = "QSUMM_CONFIG"

DEFAULTS = {
    "approach": "classification",
    "strategy": "threshold",
    "stopwords": None,
    "abbreviations": None,
    "include_titles": True,
    "seed": 42,
    "n": 3,
    "folds": 10,
    "lambda": 1e-4,
    "epsilon": 0.1,
    "epochs": 20,
    "t0": None,
    "class_weight": "balanced",
    "min_df": 1,
    "k": 3,
    "t": 0.1,
    "hi": 0.7,
    "lo": 0.3,
    "dskip": 4,
    "mode": "SU",
}


class ConfigError(ValueError):
    pass


def _value(raw):
    raw = raw.strip()
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("none", "null"):
        return None
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def parse_config(text):
    out = {}
    section = ""
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, val = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if section:
            key = f"{section}.{key}"
        out[key] = _value(val)
    return out


def load_config(path=None):
    """Config file at ``path``, else at $QSUMM_CONFIG, else empty."""
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def effective(cli_values, file_values):
    """CLI flag > config file > built-in default."""
    merged = dict(DEFAULTS)
    for k, v in file_values.items():
        merged[k.split(".")[-1]] = v
    for k, v in cli_values.items():
        if v is not None:
            merged[k] = v
    return merged
