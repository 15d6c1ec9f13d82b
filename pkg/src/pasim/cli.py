"""Command line front-end: ``pasim dm``, ``pasim frame-plan``, ``pasim sim``.

Exit codes: 0 success, 1 data error, 2 configuration error.

Configuration files are JSON objects with the keys of
:class:`ExperimentConfig`; command line flags override file values.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from .ccdm import CcdmCodec, Composition
from .constellation import AmplitudeAlphabet
from .errors import ShapingError
from .ess import EssCodec, build_trellis
from .metrics import SimRecord
from .pas_frame import net_rate, plan_frame
from .simulate import CODEWORD_LEN, SCHEMES, build_system, dm_input_bits, make_shaper, simulate_point

EXIT_OK, EXIT_DATA, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: str = "ess"
    n: int = 200
    fec_rate: str = "4/5"
    target_net_rate_4d: str = "9"
    snr_start: float = 8.0
    snr_stop: float = 22.0
    snr_step: float = 0.5
    codewords: int = 20
    seed: int = 0
    output: str | None = None
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.snr_step <= 0 or self.snr_stop < self.snr_start:
            raise ConfigError("SNR sweep is empty: need snr_step > 0 and snr_stop >= snr_start")
        if self.codewords < 1:
            raise ConfigError("codewords must be positive")
        try:
            self.layout()
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(str(exc)) from exc
        return self

    @property
    def n_effective(self) -> int:
        return 1 if self.scheme == "uniform" else self.n

    def layout(self):
        alphabet = AmplitudeAlphabet.pam(4)
        c = Fraction(self.fec_rate)
        # divisibility and sign-budget checks before solving for k
        plan_frame(CODEWORD_LEN, c, alphabet, self.n_effective, 0)
        if self.scheme == "uniform":
            k = alphabet.bits_per_amplitude
        else:
            k = dm_input_bits(self.n, c, Fraction(self.target_net_rate_4d), alphabet)
        lay = plan_frame(CODEWORD_LEN, c, alphabet, self.n_effective, k)
        if net_rate(lay) != Fraction(self.target_net_rate_4d):
            raise ValueError(f"layout carries {net_rate(lay)} bit/4D, not {self.target_net_rate_4d}")
        return lay

    def snr_grid(self) -> np.ndarray:
        count = int(np.floor((self.snr_stop - self.snr_start) / self.snr_step + 1e-9)) + 1
        return np.round(self.snr_start + self.snr_step * np.arange(count), 6)

    def system_key(self):
        return (self.scheme, self.n_effective, Fraction(self.fec_rate), Fraction(self.target_net_rate_4d))


def load_config(path: str | None, overrides: dict) -> ExperimentConfig:
    values = {}
    if path:
        try:
            values = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError("config file must hold a JSON object")
    unknown = set(values) - {f.name for f in fields(ExperimentConfig)}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    casts = {"n": int, "codewords": int, "seed": int, "workers": int, "snr_start": float,
             "snr_stop": float, "snr_step": float, "fec_rate": str, "target_net_rate_4d": str,
             "scheme": str, "output": str}
    try:
        values = {k: (None if v is None else casts[k](v)) for k, v in values.items()}
        cfg = ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


# -- dm -------------------------------------------------------------------


def _dm_codec(args):
    alphabet = AmplitudeAlphabet.pam(args.levels)
    if args.scheme == "ess":
        if args.e_max is not None:
            return EssCodec(build_trellis(args.n, alphabet, args.e_max), args.k)
        return make_shaper("ess", args.n, args.k, args.levels)
    if args.composition:
        counts = tuple(int(c) for c in args.composition.split(","))
        comp = Composition(alphabet, counts)
        if comp.n != args.n:
            raise ConfigError(f"composition sums to {comp.n}, not n={args.n}")
        return CcdmCodec(comp, args.k)
    return make_shaper("ccdm", args.n, args.k, args.levels)


def _codec_meta(codec, scheme, blocks):
    meta = {"scheme": scheme, "n": codec.n, "k": codec.k, "levels": list(codec.alphabet.levels),
            "blocks": blocks}
    if scheme == "ess":
        meta["e_max"] = codec.e_max
    else:
        meta["composition"] = list(codec.composition.counts)
    return meta


def cmd_dm(args) -> int:
    try:
        codec = _dm_codec(args)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    data = Path(args.input).read_bytes()
    k, n = codec.k, codec.n
    out = bytearray()
    if args.direction == "encode":
        total = 8 * len(data)
        blocks = total // k if k else 0
        expected = (blocks * k + 7) // 8
        if k == 0 or len(data) != expected or blocks == 0:
            raise DataError(
                f"input holds {len(data)} bytes; expected ceil(blocks * {k} / 8) bytes for a whole "
                f"number of {k}-bit blocks (e.g. {(k + 7) // 8} bytes for one block)"
            )
        bits = np.unpackbits(np.frombuffer(data, np.uint8))
        if bits[blocks * k:].any():
            raise DataError("non-zero padding bits after the last block")
        for b in range(blocks):
            out += codec.encode_levels(bits[b * k:(b + 1) * k]).astype(np.uint8).tobytes()
    else:
        if len(data) == 0 or len(data) % n:
            raise DataError(f"input holds {len(data)} bytes; expected a positive multiple of n={n}")
        blocks = len(data) // n
        levels = np.frombuffer(data, np.uint8).reshape(blocks, n)
        chunks, failed = [], []
        for b, row in enumerate(levels):
            try:
                if row.max() >= len(codec.alphabet):
                    raise ShapingError(f"level index {row.max()} outside the alphabet")
                chunks.append(codec.decode_levels(row))
            except ShapingError as exc:
                failed.append(f"block {b}: {exc}")
        if failed:
            for line in failed:
                print(line, file=sys.stderr)
            raise DataError(f"{len(failed)} of {blocks} blocks failed to decode")
        out += np.packbits(np.concatenate(chunks)).tobytes()
    Path(args.output).write_bytes(bytes(out))
    meta = _codec_meta(codec, args.scheme, blocks)
    meta["direction"] = args.direction
    Path(str(args.output) + ".json").write_text(json.dumps(meta, indent=2) + "\n")
    return EXIT_OK


# -- frame-plan ------------------------------------------------------------


def format_layout(cfg: ExperimentConfig) -> str:
    lay = cfg.layout()
    rows = [(f.name, getattr(lay, f.name)) for f in fields(lay)]
    rows.append(("symbols_per_codeword_2d", lay.symbols_per_codeword))
    rate = net_rate(lay)
    rows.append(("net_rate_4d", f"{float(rate):.3f} ({rate})"))
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name:<{width}}  {value}" for name, value in rows) + "\n"


def cmd_frame_plan(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    sys.stdout.write(format_layout(cfg))
    return EXIT_OK


# -- sim -------------------------------------------------------------------


def run_sweep(cfg: ExperimentConfig, progress=None) -> list[SimRecord]:
    system = build_system(*cfg.system_key())
    records = []
    for snr in cfg.snr_grid():
        rec = simulate_point(system, float(snr), cfg.codewords, cfg.seed,
                             workers=cfg.workers, key=cfg.system_key())
        records.append(rec)
        if progress is not None:
            print(f"{cfg.scheme} n={cfg.n_effective} {snr:.2f} dB: post-shaping BER "
                  f"{rec.ber_post_shaping:.3e}, AIR_n {rec.air_n_4d:.3f}", file=progress, flush=True)
    return records


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SimRecord.header())
    for r in records:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in asdict(r).values()])
    return buf.getvalue()


def cmd_sim(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    text = records_to_csv(run_sweep(cfg, progress=sys.stderr))
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _overrides(args) -> dict:
    keys = [f.name for f in fields(ExperimentConfig)]
    return {k: getattr(args, k, None) for k in keys}


def _add_config_flags(p):
    p.add_argument("--config", help="JSON experiment configuration")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--n", type=int, help="DM blocklength (ignored for uniform)")
    p.add_argument("--fec-rate", dest="fec_rate", help="LDPC rate, e.g. 4/5")
    p.add_argument("--target-net-rate", dest="target_net_rate_4d", help="bits per 4D symbol")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pasim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    dm = sub.add_parser("dm", help="encode or decode files with a distribution matcher")
    dm.add_argument("direction", choices=("encode", "decode"))
    dm.add_argument("--scheme", choices=("ess", "ccdm"), required=True)
    dm.add_argument("--n", type=int, required=True)
    dm.add_argument("--k", type=int, required=True)
    dm.add_argument("--levels", type=int, default=4, help="number of amplitude levels")
    dm.add_argument("--e-max", dest="e_max", type=int, help="ESS energy bound (default: smallest sufficient)")
    dm.add_argument("--composition", help="CCDM counts, comma separated (default: selected)")
    dm.add_argument("input")
    dm.add_argument("output")
    dm.set_defaults(func=cmd_dm)

    fp = sub.add_parser("frame-plan", help="print the PAS frame bit budget")
    _add_config_flags(fp)
    fp.set_defaults(func=cmd_frame_plan)

    sim = sub.add_parser("sim", help="AWGN simulation sweep, CSV output")
    _add_config_flags(sim)
    sim.add_argument("--snr-start", dest="snr_start", type=float)
    sim.add_argument("--snr-stop", dest="snr_stop", type=float)
    sim.add_argument("--snr-step", dest="snr_step", type=float)
    sim.add_argument("--codewords", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--workers", type=int)
    sim.add_argument("--output", "-o")
    sim.set_defaults(func=cmd_sim)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
