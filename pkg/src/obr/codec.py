"""Six-dot cells, language tables and decoding of cell lines to text.

A cell is stored as a 6-bit mask where bit ``i - 1`` is dot ``i``; dots 1-3
run down the left column and 4-6 down the right. Tables and CLI output use
dot strings, "101101" meaning dots 1, 3, 4 and 6.
"""
from dataclasses import dataclass, field
from types import MappingProxyType

from .errors import TableFormatError

__all__ = [
    "BrailleCell", "CodeTable", "Lookup", "Diagnostic", "DecodedDocument",
    "EMPTY", "ERASURE", "ERASURE_GLYPH", "UNKNOWN_GLYPH",
    "english_grade1_table", "malayalam_vowel_table", "load_table", "parse_table",
    "table_for", "lookup", "to_unicode_braille", "from_unicode_braille", "decode_lines",
]


@dataclass(frozen=True, order=True)
class BrailleCell:
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask <= 63:
            raise ValueError(f"cell mask must be in [0, 63], got {self.mask}")

    @classmethod
    def from_bits(cls, bits):
        """Build from a dot string such as "100000" (dot 1 first)."""
        if len(bits) != 6 or set(bits) - {"0", "1"}:
            raise ValueError(f"dot string must be six 0/1 characters, got {bits!r}")
        return cls(sum(1 << i for i, b in enumerate(bits) if b == "1"))

    @classmethod
    def from_dots(cls, dots):
        """Build from dot numbers, e.g. ``(1, 3, 4)``."""
        return cls(sum(1 << (d - 1) for d in set(dots)))

    @property
    def bits(self):
        return "".join("1" if self.mask >> i & 1 else "0" for i in range(6))

    @property
    def dots(self):
        return tuple(i + 1 for i in range(6) if self.mask >> i & 1)

    def __bool__(self):
        return self.mask != 0

    def __repr__(self):
        return f"BrailleCell({self.bits})"


EMPTY = BrailleCell(0)
ERASURE = BrailleCell(63)
ERASURE_GLYPH = "⠿"
UNKNOWN_GLYPH = "?"


def to_unicode_braille(cell):
    return chr(0x2800 + cell.mask)


def from_unicode_braille(char):
    """Inverse of :func:`to_unicode_braille`; None for non-pattern characters."""
    cp = ord(char)
    if 0x2800 <= cp <= 0x283F:
        return BrailleCell(cp - 0x2800)
    return None


@dataclass(frozen=True, eq=False)
class CodeTable:
    """Mapping from cell masks to graphemes for one language.

    ``aliases`` holds further graphemes printed with the same code as an
    entry; looking such a code up yields an ambiguous result.
    """
    language: str
    entries: MappingProxyType
    aliases: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    def __post_init__(self):
        entries = {BrailleCell(int(k)).mask: v for k, v in dict(self.entries).items()}
        aliases = {BrailleCell(int(k)).mask: tuple(v) for k, v in dict(self.aliases).items() if v}
        if 0 in entries:
            raise ValueError("code 000000 is reserved for the blank cell")
        missing = set(aliases) - set(entries)
        if missing:
            raise ValueError(f"alias codes without a primary entry: {sorted(missing)}")
        object.__setattr__(self, "entries", MappingProxyType(entries))
        object.__setattr__(self, "aliases", MappingProxyType(aliases))

    @classmethod
    def from_rows(cls, language, rows):
        """Build from (dot string, grapheme) rows; repeated codes become aliases."""
        entries, aliases = {}, {}
        for bits, grapheme in rows:
            mask = BrailleCell.from_bits(bits).mask
            if mask in entries:
                aliases.setdefault(mask, []).append(grapheme)
            else:
                entries[mask] = grapheme
        return cls(language, entries, aliases)

    def encoder(self):
        """Grapheme to cell map covering entries and aliases."""
        enc = {}
        for mask, g in self.entries.items():
            enc.setdefault(g, BrailleCell(mask))
        for mask, alts in self.aliases.items():
            for g in alts:
                enc.setdefault(g, BrailleCell(mask))
        return enc

    def rows(self):
        """(cell, grapheme, is_alias) for every entry and alias, by ascending mask."""
        out = []
        for mask in sorted(self.entries):
            out.append((BrailleCell(mask), self.entries[mask], False))
            out.extend((BrailleCell(mask), g, True) for g in self.aliases.get(mask, ()))
        return out


_ENGLISH_DOTS = {
    "a": "1", "b": "12", "c": "14", "d": "145", "e": "15", "f": "124",
    "g": "1245", "h": "125", "i": "24", "j": "245", "k": "13", "l": "123",
    "m": "134", "n": "1345", "o": "135", "p": "1234", "q": "12345",
    "r": "1235", "s": "234", "t": "2345", "u": "136", "v": "1236",
    "w": "2456", "x": "1346", "y": "13456", "z": "1356",
}

# Column order of the printed vowel table. The table gives 010010 to both
# O and AI; the first one read stays primary.
_MALAYALAM_VOWELS = [
    ("100000", "അ"),  # a
    ("010110", "ആ"),  # aa
    ("011000", "ഇ"),  # i
    ("000110", "ഈ"),  # ii
    ("100011", "ഉ"),  # u
    ("101101", "ഊ"),  # uu
    ("001001", "എ"),  # e
    ("100100", "ഏ"),  # ee
    ("010010", "ഒ"),  # o
    ("010010", "ഐ"),  # ai
    ("100110", "ഓ"),  # oo
    ("011001", "ഔ"),  # au
]


def english_grade1_table():
    """Grade-1 English letters a-z."""
    return CodeTable("en", {BrailleCell.from_dots(int(d) for d in dots).mask: letter
                            for letter, dots in _ENGLISH_DOTS.items()})


def malayalam_vowel_table():
    return CodeTable.from_rows("ml", _MALAYALAM_VOWELS)


def parse_table(text, language="custom"):
    """Parse the plain-text table format.

    One ``<six 0/1 chars><TAB><grapheme>`` entry per line; blank lines and
    lines starting with ``#`` are skipped.
    """
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        bits, sep, grapheme = line.partition("\t")
        if not sep or not grapheme:
            raise TableFormatError(f"line {lineno}: expected '<bits>\\t<grapheme>'")
        try:
            cell = BrailleCell.from_bits(bits)
        except ValueError as exc:
            raise TableFormatError(f"line {lineno}: {exc}") from None
        if not cell:
            raise TableFormatError(f"line {lineno}: 000000 is the blank cell")
        rows.append((bits, grapheme))
    if not rows:
        raise TableFormatError("table has no entries")
    return CodeTable.from_rows(language, rows)


def load_table(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise TableFormatError(f"{path}: not UTF-8 ({exc})") from None
    return parse_table(text, language=str(path))


_BUILTIN = {"en": english_grade1_table, "ml": malayalam_vowel_table}


def table_for(language):
    try:
        return _BUILTIN[language]()
    except KeyError:
        raise TableFormatError(f"unknown language {language!r}; "
                               f"known: {', '.join(sorted(_BUILTIN))}") from None


# --- lookup and decoding ---------------------------------------------------

@dataclass(frozen=True)
class Lookup:
    """Result of looking up one cell.

    ``kind`` is one of "grapheme", "space", "erasure", "unknown" or
    "ambiguous"; ``alternates`` is only filled for ambiguous codes.
    """
    kind: str
    grapheme: str = ""
    alternates: tuple = ()


def lookup(cell, table):
    if cell.mask == 0:
        return Lookup("space", " ")
    g = table.entries.get(cell.mask)
    if g is None:
        if cell == ERASURE:
            return Lookup("erasure", ERASURE_GLYPH)
        return Lookup("unknown", UNKNOWN_GLYPH)
    alts = table.aliases.get(cell.mask)
    if alts:
        return Lookup("ambiguous", g, alts)
    return Lookup("grapheme", g)


@dataclass(frozen=True)
class Diagnostic:
    position: tuple  # (line, cell index within the line)
    kind: str  # "unknown-code", "erasure" or "ambiguous-code"
    detail: str

    def __str__(self):
        line, col = self.position
        return f"line {line + 1}, cell {col + 1}: {self.kind}: {self.detail}"


@dataclass
class DecodedDocument:
    lines: list
    diagnostics: list = field(default_factory=list)

    @property
    def text(self):
        return "\n".join(self.lines)


def decode_lines(lines, table):
    doc = DecodedDocument([])
    for li, cells in enumerate(lines):
        out = []
        for ci, cell in enumerate(cells):
            res = lookup(cell, table)
            out.append(res.grapheme)
            where = (li, ci)
            if res.kind == "erasure":
                doc.diagnostics.append(Diagnostic(where, "erasure", "erased cell 111111"))
            elif res.kind == "unknown":
                doc.diagnostics.append(Diagnostic(
                    where, "unknown-code",
                    f"no {table.language} grapheme for {cell.bits} {to_unicode_braille(cell)}"))
            elif res.kind == "ambiguous":
                doc.diagnostics.append(Diagnostic(
                    where, "ambiguous-code",
                    f"{cell.bits} read as {res.grapheme}; alternates: {', '.join(res.alternates)}"))
        doc.lines.append("".join(out))
    return doc
