"""Deterministic high-throughput simulator for radius-r CA on layered alphabets.

States are dense integer codes through a layered-product codec (with an
optional composite blank state that no projection is defined on).  Rules
come in three flavours behind one interface: materialized lookup tables
(stepped by a parallel numba kernel), memoizing callables for state
spaces too large to tabulate, and whole-row steppers for structured
rules that decode the layer structure themselves.  Finite
configurations are cyclic (exact for spatially periodic points) or
fixed-background (exact until information would leave the array, which
is tracked and reported).
"""

from __future__ import annotations

import hashlib
import io
import json
import struct
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from numba import njit, prange, set_num_threads

from .words import Alphabet

__all__ = [
    "LayeredAlphabet",
    "CompiledRule",
    "LayeredConfiguration",
    "Trace",
    "LightConeError",
    "NonQuiescentBackgroundError",
    "step",
    "run",
    "render",
    "trace_dump",
    "trace_load",
    "configuration",
    "set_thread_count",
]

TABLE_ENTRY_LIMIT = 2**26


class LightConeError(RuntimeError):
    """Non-background information would leave the finite array."""


class NonQuiescentBackgroundError(ValueError):
    """The declared background state is not a fixed point of the rule."""


def set_thread_count(n: int) -> None:
    """Set the worker-thread count for parallel stepping."""
    set_num_threads(max(1, int(n)))


# ---------------------------------------------------------------------
# layered alphabet codec
# ---------------------------------------------------------------------


class LayeredAlphabet:
    """A product-of-layers state space with a dense integer codec.

    Parameters
    ----------
    layers : sequence of (name, Alphabet)
        Ordered layers; the first layer is the most significant digit
        of the code.
    blank : str or None
        Optional distinguished composite blank state.  It receives the
        single code after all product states; projections are undefined
        on it.

    Examples
    --------
    >>> from glimset.words import Alphabet
    >>> la = LayeredAlphabet([("main", Alphabet("01")), ("clock", Alphabet("abc"))])
    >>> la.total
    6
    >>> la.encode(("1", "c"))
    5
    >>> la.decode(5)
    ('1', 'c')
    >>> la.project(5, "clock")
    'c'
    """

    def __init__(self, layers, blank: Optional[str] = None):
        self.layers = tuple((str(name), aleph) for name, aleph in layers)
        if not self.layers:
            raise ValueError("need at least one layer")
        names = [name for name, _ in self.layers]
        if len(set(names)) != len(names):
            raise ValueError("layer names must be distinct")
        self._index = {name: i for i, (name, _) in enumerate(self.layers)}
        sizes = [len(a) for _, a in self.layers]
        strides = [1] * len(sizes)
        for i in range(len(sizes) - 2, -1, -1):
            strides[i] = strides[i + 1] * sizes[i + 1]
        self._sizes = tuple(sizes)
        self._strides = tuple(strides)
        self.product_states = strides[0] * sizes[0]
        self.blank = blank
        self.blank_code = self.product_states if blank is not None else None
        self.total = self.product_states + (1 if blank is not None else 0)

    @classmethod
    def from_alphabet(cls, alphabet: Alphabet, name: str = "cells"):
        """Wrap a flat alphabet as a single-layer state space."""
        return cls([(name, alphabet)])

    def __eq__(self, other):
        return (
            isinstance(other, LayeredAlphabet)
            and self.layers == other.layers
            and self.blank == other.blank
        )

    def __hash__(self):
        return hash((self.layers, self.blank))

    def __repr__(self):
        return "LayeredAlphabet(%r, blank=%r)" % (list(self.layers), self.blank)

    # ----- codec ---------------------------------------------------------

    def layer_names(self):
        return tuple(name for name, _ in self.layers)

    def size_of(self, name: str) -> int:
        return self._sizes[self._index[name]]

    def stride_of(self, name: str) -> int:
        return self._strides[self._index[name]]

    def alphabet_of(self, name: str) -> Alphabet:
        return self.layers[self._index[name]][1]

    def is_blank(self, code: int) -> bool:
        return self.blank_code is not None and code == self.blank_code

    def encode(self, state) -> int:
        """Code of a layered state (tuple/dict of symbols, or the blank)."""
        if self.blank is not None and state == self.blank:
            return self.blank_code
        if isinstance(state, dict):
            state = tuple(state[name] for name, _ in self.layers)
        state = tuple(state)
        if len(state) != len(self.layers):
            raise ValueError(
                "expected %d layer symbols, got %r" % (len(self.layers), state)
            )
        code = 0
        for (name, alphabet), sym, stride in zip(
            self.layers, state, self._strides
        ):
            code += alphabet.index(sym) * stride
        return code

    def decode(self, code: int) -> tuple:
        """Layer symbols of a product code; the blank has no layers."""
        if self.is_blank(code):
            raise ValueError("the blank state has no layer decomposition")
        if not 0 <= code < self.product_states:
            raise ValueError("code out of range: %r" % (code,))
        out = []
        for (name, alphabet), stride, size in zip(
            self.layers, self._strides, self._sizes
        ):
            out.append(alphabet.symbols[(code // stride) % size])
        return tuple(out)

    def project(self, code: int, name: str):
        """The symbol a code carries on one layer (undefined on the blank)."""
        if self.is_blank(code):
            raise ValueError("projection undefined on the blank state")
        i = self._index[name]
        if not 0 <= code < self.product_states:
            raise ValueError("code out of range: %r" % (code,))
        alphabet = self.layers[i][1]
        return alphabet.symbols[(code // self._strides[i]) % self._sizes[i]]

    def codec_descriptor(self) -> dict:
        """JSON-ready description of the codec (for trace headers)."""
        return {
            "layers": [
                [name, list(alphabet.symbols)] for name, alphabet in self.layers
            ],
            "blank": self.blank,
        }

    @classmethod
    def from_codec_descriptor(cls, desc: dict) -> "LayeredAlphabet":
        layers = [
            (name, Alphabet(symbols)) for name, symbols in desc["layers"]
        ]
        return cls(layers, blank=desc.get("blank"))


# ---------------------------------------------------------------------
# compiled rules
# ---------------------------------------------------------------------


@njit(parallel=True, cache=True)
def _table_step_kernel(padded, table, states, r, out):  # pragma: no cover
    n = out.size
    w = 2 * r + 1
    for i in prange(n):
        idx = 0
        for d in range(w):
            idx = idx * states + padded[i + d]
        out[i] = table[idx]


def _best_table_dtype(states: int):
    if states <= 2**8:
        return np.uint8
    if states <= 2**16:
        return np.uint16
    return np.uint32


class CompiledRule:
    """A radius-r local rule over dense state codes.

    Flavours (exactly one per rule):

    - ``table``: flat lookup table indexed by the base-`states` window
      code, stepped by a parallel kernel;
    - ``func``: a window-tuple callable, memoized per distinct window;
    - ``row_step``: a callable mapping the whole padded row to the core
      outputs, for structured rules that decode layers themselves.

    Use the ``from_*`` constructors.  ``descriptor`` feeds the stable
    content hash recorded in traces and manifests.
    """

    def __init__(self, radius, states, table=None, func=None, row_step=None,
                 descriptor: Optional[str] = None):
        if radius < 1:
            raise ValueError("radius must be >= 1")
        if sum(x is not None for x in (table, func, row_step)) != 1:
            raise ValueError("exactly one rule flavour required")
        self.radius = int(radius)
        self.states = int(states)
        self.table = table
        self.func = func
        self.row_step = row_step
        self._memo: dict = {}
        self._descriptor = descriptor
        self._quiescent: dict = {}

    # ----- constructors ---------------------------------------------------

    @classmethod
    def from_table(cls, table, radius: int, states: int,
                   descriptor: Optional[str] = None) -> "CompiledRule":
        table = np.ascontiguousarray(table)
        want = states ** (2 * radius + 1)
        if table.size != want:
            raise ValueError("table size %d != states^(2r+1) = %d"
                             % (table.size, want))
        if table.size and int(table.max()) >= states:
            raise ValueError("table values must be < states")
        table = table.astype(_best_table_dtype(states), copy=False)
        return cls(radius, states, table=table, descriptor=descriptor)

    @classmethod
    def from_function(cls, func: Callable, radius: int, states: int,
                      descriptor: Optional[str] = None,
                      force_table: Optional[bool] = None) -> "CompiledRule":
        """Compile a window-tuple function; tabulated when feasible.

        The table is materialized when states^(2r+1) table entries fit
        the TABLE_ENTRY_LIMIT budget (or when forced), otherwise the
        function is wrapped with per-window memoization.
        """
        entries = states ** (2 * radius + 1)
        use_table = entries <= TABLE_ENTRY_LIMIT
        if force_table is not None:
            use_table = force_table
        if not use_table:
            return cls(radius, states, func=func, descriptor=descriptor)
        w = 2 * radius + 1
        table = np.empty(entries, dtype=_best_table_dtype(states))
        window = [0] * w
        for idx in range(entries):
            rem = idx
            for d in range(w - 1, -1, -1):
                window[d] = rem % states
                rem //= states
            table[idx] = func(tuple(window))
        return cls(radius, states, table=table, descriptor=descriptor)

    @classmethod
    def from_row_stepper(cls, row_step: Callable, radius: int, states: int,
                         descriptor: str) -> "CompiledRule":
        """Wrap a padded-row -> core-outputs callable (e.g. a numba kernel)."""
        return cls(radius, states, row_step=row_step, descriptor=descriptor)

    # ----- evaluation -----------------------------------------------------

    def apply_padded(self, padded: np.ndarray) -> np.ndarray:
        """Outputs for the core cells of a row padded by radius each side."""
        n = padded.size - 2 * self.radius
        if n < 0:
            raise ValueError("padded row shorter than 2r")
        if self.row_step is not None:
            out = np.asarray(self.row_step(padded), dtype=np.int64)
            if out.size != n:
                raise ValueError("row stepper returned %d cells, expected %d"
                                 % (out.size, n))
            return out
        if self.table is not None:
            out = np.empty(n, dtype=np.int64)
            _table_step_kernel(padded, self.table, self.states,
                               self.radius, out)
            return out
        return self._apply_memoized(padded, n)

    def _apply_memoized(self, padded: np.ndarray, n: int) -> np.ndarray:
        w = 2 * self.radius + 1
        if self.states ** w >= 2**62:
            # window codes would overflow int64: memoize on tuples
            out = np.empty(n, dtype=np.int64)
            memo = self._memo
            for i in range(n):
                key = tuple(int(x) for x in padded[i : i + w])
                if key not in memo:
                    memo[key] = int(self.func(key))
                out[i] = memo[key]
            return out
        codes = padded[:n].astype(np.int64)
        for d in range(1, w):
            codes = codes * self.states + padded[d : d + n]
        uniq, inverse = np.unique(codes, return_inverse=True)
        outs = np.empty(uniq.size, dtype=np.int64)
        for j, code in enumerate(uniq):
            key = int(code)
            if key not in self._memo:
                rem = key
                window = [0] * w
                for d in range(w - 1, -1, -1):
                    window[d] = rem % self.states
                    rem //= self.states
                self._memo[key] = int(self.func(tuple(window)))
            outs[j] = self._memo[key]
        return outs[inverse]

    def window_value(self, window: Sequence[int]) -> int:
        """The rule on one explicit window (any flavour)."""
        window = [int(x) for x in window]
        if len(window) != 2 * self.radius + 1:
            raise ValueError("window must have 2r+1 entries")
        return int(self.apply_padded(np.array(window, dtype=np.int64))[0])

    def is_quiescent(self, state: int) -> bool:
        """Whether the uniform `state` row is a fixed point of the rule."""
        key = int(state)
        if key not in self._quiescent:
            w = 2 * self.radius + 1
            row = np.full(w + 2 * self.radius, key, dtype=np.int64)
            outs = self.apply_padded(row)
            self._quiescent[key] = bool(np.all(outs == key))
        return self._quiescent[key]

    def content_hash(self) -> str:
        """Stable hex digest identifying the rule (for manifests)."""
        h = hashlib.sha256()
        h.update(b"glimset-rule-v1")
        h.update(struct.pack("<qq", self.radius, self.states))
        if self._descriptor is not None:
            h.update(self._descriptor.encode())
        elif self.table is not None:
            h.update(self.table.tobytes())
        else:
            name = getattr(self.func, "__qualname__", repr(self.func))
            h.update(name.encode())
        return h.hexdigest()


# ---------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------


class LayeredConfiguration:
    """A finite row of state codes with declared boundary semantics.

    ``boundary`` is "cyclic" (simulates the spatially periodic point
    exactly) or "fixed" with a background code (exact while no
    non-background information would leave the array; violations raise
    LightConeError rather than silently wrapping).
    """

    def __init__(self, alphabet: LayeredAlphabet, cells,
                 boundary: str = "cyclic",
                 background: Optional[int] = None):
        self.alphabet = alphabet
        self.cells = np.ascontiguousarray(cells, dtype=np.int64)
        if self.cells.ndim != 1 or self.cells.size == 0:
            raise ValueError("cells must be a nonempty 1D sequence")
        if int(self.cells.min()) < 0 or int(self.cells.max()) >= alphabet.total:
            raise ValueError("cell codes out of range")
        if boundary not in ("cyclic", "fixed"):
            raise ValueError("boundary must be 'cyclic' or 'fixed'")
        if boundary == "fixed":
            if background is None:
                raise ValueError("fixed boundary needs a background code")
            background = int(background)
            if not 0 <= background < alphabet.total:
                raise ValueError("background code out of range")
        else:
            background = None
        self.boundary = boundary
        self.background = background

    def __len__(self):
        return self.cells.size

    def __eq__(self, other):
        return (
            isinstance(other, LayeredConfiguration)
            and self.alphabet == other.alphabet
            and self.boundary == other.boundary
            and self.background == other.background
            and np.array_equal(self.cells, other.cells)
        )

    def contamination(self) -> tuple:
        """Tight [lo, hi) interval of non-background cells (fixed mode)."""
        if self.boundary != "fixed":
            raise ValueError("contamination applies to fixed boundaries")
        nz = np.nonzero(self.cells != self.background)[0]
        if nz.size == 0:
            return (0, 0)
        return (int(nz[0]), int(nz[-1]) + 1)

    def symbols(self) -> list:
        """Decoded layer tuples (the blank decodes to the blank token)."""
        out = []
        for code in self.cells:
            code = int(code)
            if self.alphabet.is_blank(code):
                out.append(self.alphabet.blank)
            else:
                out.append(self.alphabet.decode(code))
        return out


def configuration(alphabet, cells, boundary: str = "cyclic",
                  background=None) -> LayeredConfiguration:
    """Build a configuration from codes or layer states.

    ``alphabet`` may be a LayeredAlphabet or a plain Alphabet (wrapped
    as a single layer).  ``cells`` entries may be integer codes or
    anything LayeredAlphabet.encode accepts; ``background`` likewise.
    """
    if isinstance(alphabet, Alphabet):
        alphabet = LayeredAlphabet.from_alphabet(alphabet)
    codes = [
        c if isinstance(c, (int, np.integer)) else alphabet.encode(c)
        for c in cells
    ]
    if background is not None and not isinstance(background, (int, np.integer)):
        background = alphabet.encode(background)
    return LayeredConfiguration(alphabet, codes, boundary, background)


# ---------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------


def _padded(cells: np.ndarray, r: int, boundary: str, background) -> np.ndarray:
    if boundary == "cyclic":
        if cells.size < 2 * r + 1:
            raise ValueError("cyclic rows must have >= 2r+1 cells")
        return np.concatenate([cells[-r:], cells, cells[:r]])
    pad = np.full(r, background, dtype=np.int64)
    return np.concatenate([pad, cells, pad])


def _check_fixed_mode(rule: CompiledRule, c: LayeredConfiguration):
    if not rule.is_quiescent(c.background):
        raise NonQuiescentBackgroundError(
            "background code %d is not a fixed point of the rule"
            % c.background
        )
    lo, hi = c.contamination()
    if lo == hi:  # all background: nothing can spread
        return
    if lo - rule.radius < 0 or hi + rule.radius > len(c):
        raise LightConeError(
            "non-background information would leave the array "
            "(contamination [%d, %d), radius %d, %d cells)"
            % (lo, hi, rule.radius, len(c))
        )


def step(rule: CompiledRule, c: LayeredConfiguration) -> LayeredConfiguration:
    """One synchronous application of the local rule.

    Examples
    --------
    >>> from glimset.words import Alphabet
    >>> abc = Alphabet("abc")
    >>> shift = CompiledRule.from_function(lambda w: w[2], 1, 3)
    >>> c = configuration(abc, "abc")
    >>> "".join(s[0] for s in step(shift, c).symbols())
    'bca'
    """
    if c.boundary == "fixed":
        _check_fixed_mode(rule, c)
    padded = _padded(c.cells, rule.radius, c.boundary, c.background)
    out = rule.apply_padded(padded)
    return LayeredConfiguration(c.alphabet, out, c.boundary, c.background)


# ---------------------------------------------------------------------
# traces and runs
# ---------------------------------------------------------------------

TRACE_MAGIC = b"GLTR"
TRACE_VERSION = 1


@dataclass(frozen=True, eq=False)
class Trace:
    """Captured rows of a run, restricted to a cell window.

    ``rows[i]`` is the configuration at time ``times[i]``, sliced to
    ``window`` = (lo, hi).  Rows are exact for the boundary mode's
    exactness regime.
    """

    alphabet: LayeredAlphabet
    rows: np.ndarray
    times: tuple
    window: tuple
    boundary: str
    background: Optional[int]
    steps: int
    rule_hash: str

    def __post_init__(self):
        self.rows.setflags(write=False)

    def row_config(self, i: int) -> LayeredConfiguration:
        """The i-th captured row as a configuration (window-sized)."""
        return LayeredConfiguration(
            self.alphabet, self.rows[i].copy(), self.boundary, self.background
        )


def run(rule: CompiledRule, c: LayeredConfiguration, steps: int,
        observers: Iterable = (), record_every: Optional[int] = None,
        record_times: Optional[Iterable[int]] = None,
        window: Optional[tuple] = None) -> Trace:
    """Iterate the rule, observe synchronously, and capture rows.

    Parameters
    ----------
    rule, c : the rule and start configuration.
    steps : int >= 0
        Number of applications of the rule.
    observers : iterable of (every, fn)
        After reaching each time t (including t = 0) with
        ``t % every == 0``, ``fn(t, config)`` runs synchronously.
    record_every : int, optional
        Capture every k-th time (always including t = 0); when neither
        record argument is given, only t = 0 and t = steps are kept.
    record_times : iterable of int, optional
        Explicit times to capture (union with record_every).
    window : (lo, hi), optional
        Cell interval stored in the trace (default: the whole row).

    Returns
    -------
    Trace
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    n = len(c)
    lo, hi = (0, n) if window is None else window
    if not 0 <= lo < hi <= n:
        raise ValueError("window out of range")
    wanted = set()
    if record_times is not None:
        wanted.update(int(t) for t in record_times)
    if record_every is not None:
        if record_every < 1:
            raise ValueError("record_every must be >= 1")
        wanted.update(range(0, steps + 1, record_every))
        wanted.add(0)
    if record_every is None and record_times is None:
        wanted = {0, steps}
    wanted = {t for t in wanted if 0 <= t <= steps}
    observers = [(int(every), fn) for every, fn in observers]
    for every, _ in observers:
        if every < 1:
            raise ValueError("observer interval must be >= 1")

    rows = []
    times = []
    cur = c

    def visit(t: int, config: LayeredConfiguration):
        if t in wanted:
            rows.append(config.cells[lo:hi].copy())
            times.append(t)
        for every, fn in observers:
            if t % every == 0:
                fn(t, config)

    visit(0, cur)
    for t in range(1, steps + 1):
        cur = step(rule, cur)
        visit(t, cur)

    return Trace(
        alphabet=c.alphabet,
        rows=np.array(rows, dtype=np.int64)
        if rows
        else np.empty((0, hi - lo), dtype=np.int64),
        times=tuple(times),
        window=(lo, hi),
        boundary=c.boundary,
        background=c.background,
        steps=steps,
        rule_hash=rule.content_hash(),
    )


# ---------------------------------------------------------------------
# trace dump / load (versioned binary)
# ---------------------------------------------------------------------


def trace_dump(trace: Trace) -> bytes:
    """Serialize a trace: versioned header + row-major int64 codes."""
    header = {
        "codec": trace.alphabet.codec_descriptor(),
        "boundary": trace.boundary,
        "background": trace.background,
        "steps": trace.steps,
        "rule_hash": trace.rule_hash,
        "window": list(trace.window),
        "times": list(trace.times),
        "shape": list(trace.rows.shape),
    }
    blob = json.dumps(header, sort_keys=True).encode()
    out = io.BytesIO()
    out.write(TRACE_MAGIC)
    out.write(struct.pack("<II", TRACE_VERSION, len(blob)))
    out.write(blob)
    out.write(np.ascontiguousarray(trace.rows, dtype="<i8").tobytes())
    return out.getvalue()


def trace_load(data: bytes) -> Trace:
    """Inverse of trace_dump."""
    if data[:4] != TRACE_MAGIC:
        raise ValueError("not a trace dump (bad magic)")
    version, hlen = struct.unpack("<II", data[4:12])
    if version != TRACE_VERSION:
        raise ValueError("unsupported trace version %d" % version)
    header = json.loads(data[12 : 12 + hlen].decode())
    shape = tuple(header["shape"])
    rows = np.frombuffer(
        data[12 + hlen :], dtype="<i8", count=shape[0] * shape[1]
    ).reshape(shape).astype(np.int64)
    return Trace(
        alphabet=LayeredAlphabet.from_codec_descriptor(header["codec"]),
        rows=rows,
        times=tuple(header["times"]),
        window=tuple(header["window"]),
        boundary=header["boundary"],
        background=header["background"],
        steps=header["steps"],
        rule_hash=header["rule_hash"],
    )


# ---------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------

_GLYPHS = (
    "0123456789abcdefghijklmnopqrstuvwxyz"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "#$%&*+-./:;<=>?@[]^_{|}~"
)
_ANSI_COLORS = (31, 32, 33, 34, 35, 36, 91, 92, 93, 94, 95, 96)
_RGB_PALETTE = (
    (220, 50, 47), (133, 153, 0), (181, 137, 0), (38, 139, 210),
    (211, 54, 130), (42, 161, 152), (203, 75, 22), (108, 113, 196),
    (88, 110, 117), (147, 161, 161), (238, 232, 213), (7, 54, 66),
)


def _dominant_layer(alphabet: LayeredAlphabet, code: int) -> int:
    """Index of the first layer whose symbol is not that layer's first
    symbol; -1 for the blank and for the all-default state."""
    if alphabet.is_blank(code):
        return -1
    for i, (name, _) in enumerate(alphabet.layers):
        stride = alphabet._strides[i]
        size = alphabet._sizes[i]
        if (code // stride) % size != 0:
            return i
    return -1


def _state_catalogue(trace: Trace):
    present = sorted(int(x) for x in np.unique(trace.rows))
    width = 1
    if len(present) > len(_GLYPHS):
        width = 2
    glyphs = {}
    for i, code in enumerate(present):
        if width == 1:
            glyphs[code] = _GLYPHS[i]
        else:
            glyphs[code] = _GLYPHS[i // len(_GLYPHS)] + _GLYPHS[i % len(_GLYPHS)]
    return present, glyphs, width


def _state_label(alphabet: LayeredAlphabet, code: int) -> str:
    if alphabet.is_blank(code):
        return alphabet.blank
    return ",".join(alphabet.decode(code))


def render(trace: Trace, style: str = "ansi") -> bytes:
    """Render a trace: one row per captured step, one glyph/pixel per cell.

    "ansi" yields text with a legend header (injective glyph per state
    present, colored by the stable layer-color map); "portable-pixmap"
    yields a binary PPM whose header comments document the color map.
    """
    if trace.rows.shape[0] == 0:
        raise ValueError("cannot render an empty trace")
    alphabet = trace.alphabet
    present, glyphs, width = _state_catalogue(trace)

    if style == "ansi":
        out = ["# layer colors: " + ", ".join(
            "%s=%d" % (name, _ANSI_COLORS[i % len(_ANSI_COLORS)])
            for i, (name, _) in enumerate(alphabet.layers)
        )]
        for code in present:
            out.append("# %s = %s" % (glyphs[code],
                                      _state_label(alphabet, code)))
        for i in range(trace.rows.shape[0]):
            parts = []
            for code in trace.rows[i]:
                code = int(code)
                layer = _dominant_layer(alphabet, code)
                if layer < 0:
                    parts.append(glyphs[code])
                else:
                    parts.append("\x1b[%dm%s\x1b[0m"
                                 % (_ANSI_COLORS[layer % len(_ANSI_COLORS)],
                                    glyphs[code]))
            out.append("".join(parts))
        return ("\n".join(out) + "\n").encode()

    if style == "portable-pixmap":
        h, w = trace.rows.shape
        colors = {}
        for code in present:
            layer = _dominant_layer(alphabet, code)
            if layer < 0:
                base = (0, 0, 0) if alphabet.is_blank(code) else (255, 255, 255)
            else:
                base = _RGB_PALETTE[layer % len(_RGB_PALETTE)]
            # shade within the layer color by the state's rank so the
            # map stays injective over the states present
            shade = 1.0 - 0.5 * (present.index(code) / max(1, len(present)))
            colors[code] = tuple(int(c * shade) for c in base)
        header = ["P6"]
        header.append("# layer colors: " + ", ".join(
            "%s=rgb%s" % (name, _RGB_PALETTE[i % len(_RGB_PALETTE)])
            for i, (name, _) in enumerate(alphabet.layers)
        ))
        for code in present:
            header.append("# %s -> rgb%s" % (_state_label(alphabet, code),
                                             colors[code]))
        header.append("%d %d" % (w, h))
        header.append("255")
        pixels = bytearray()
        for i in range(h):
            for code in trace.rows[i]:
                pixels.extend(colors[int(code)])
        return ("\n".join(header) + "\n").encode() + bytes(pixels)

    raise ValueError("style must be 'ansi' or 'portable-pixmap'")
