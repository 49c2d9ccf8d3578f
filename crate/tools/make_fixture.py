#!/usr/bin/env python3
"""Generate the bundled 50-record sample dataset.

Every record is built from a template with known intent, then verified with
an independent Python evaluator and value classifier before being written:

* all statements execute to true,
* the value-leaf classes tally to 72 table / 21 inferred / 7 auxiliary,
* exactly 12 records use legacy `hop` over a view (the first-row rewrite).

Run from the repository root:  python3 tools/make_fixture.py
"""

import json
import random
import re
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates/logicform/fixtures/sample50.json"

EQ_EPS = 1e-6
ROUND_TOL = 0.10

MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5, "june": 6,
    "july": 7, "august": 8, "september": 9, "october": 10, "november": 11,
    "december": 12,
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "jun": 6, "jul": 7, "aug": 8,
    "sep": 9, "sept": 9, "oct": 10, "nov": 11, "dec": 12,
}
DAYS_IN = {1: 31, 2: 29, 3: 31, 4: 30, 5: 31, 6: 30, 7: 31, 8: 31, 9: 30,
           10: 31, 11: 30, 12: 31}


def normalize(s):
    return " ".join(s.split()).lower()


def parse_numeric_cell(s):
    t = s.strip()
    if t.endswith("%"):
        t = t[:-1].rstrip()
    if not t:
        return None
    sign = 1.0
    if t.startswith("-"):
        sign, t = -1.0, t[1:]
    elif t.startswith("+"):
        t = t[1:]
    if "." in t:
        ip, fp = t.split(".", 1)
        if not all(c.isdigit() for c in fp):
            return None
    else:
        ip, fp = t, None
    if "," in ip:
        gs = ip.split(",")
        if not gs[0] or len(gs[0]) > 3 or not gs[0].isdigit():
            return None
        if any(len(g) != 3 or not g.isdigit() for g in gs[1:]):
            return None
        digits = "".join(gs)
    else:
        if not all(c.isdigit() for c in ip):
            return None
        digits = ip
    if not digits and not fp:
        return None
    text = digits + ("." + fp if fp else "")
    try:
        return sign * float(text)
    except ValueError:
        return None


def extract_number(s):
    v = parse_numeric_cell(s)
    if v is not None:
        return v
    m = re.search(r"[0-9]+(?:\.[0-9]+)?", s)
    return float(m.group(0)) if m else None


def parse_date_cell(s):
    t = s.strip()
    m = re.fullmatch(r"(\d{4})-(\d{2})-(\d{2})", t)
    if m:
        y, mo, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
        return (y, mo, d) if 1 <= mo <= 12 and 1 <= d <= DAYS_IN.get(mo, 0) else None
    toks = t.replace(",", " ").lower().split()

    def month(tok):
        return MONTHS.get(tok.rstrip("."))

    def day(tok):
        return int(tok) if tok.isdigit() and len(tok) <= 2 and 1 <= int(tok) <= 31 else None

    def year(tok):
        return int(tok) if tok.isdigit() and len(tok) == 4 else None

    if len(toks) == 2:
        m_, d_ = month(toks[0]), day(toks[1])
        if m_ and d_ and d_ <= DAYS_IN[m_]:
            return (2000, m_, d_)
        m_, y_ = month(toks[0]), year(toks[1])
        if m_ and y_:
            return (y_, m_, 1)
        return None
    if len(toks) == 3:
        m_, d_, y_ = month(toks[0]), day(toks[1]), year(toks[2])
        if m_ and d_ and y_ and d_ <= DAYS_IN[m_]:
            return (y_, m_, d_)
        d_, m_, y_ = day(toks[0]), month(toks[1]), year(toks[2])
        if d_ and m_ and y_ and d_ <= DAYS_IN[m_]:
            return (y_, m_, d_)
    return None


def coerce(s):
    n = parse_numeric_cell(s)
    if n is not None:
        return ("num", n)
    d = parse_date_cell(s)
    if d is not None:
        return ("date", d)
    return ("text", normalize(s))


def num_eq(a, b):
    return abs(a - b) <= EQ_EPS * max(abs(a), abs(b), 1.0)


def round_eq(a, b):
    return abs(a - b) <= ROUND_TOL * max(abs(a), abs(b), 1.0)


# ---- tree helpers: ('rule', name, [children]) | ('col', text) | ('val', text)

def rule(name, *children):
    return ("rule", name, list(children))


def col(text):
    return ("col", text)


def val(text):
    return ("val", text)


class Evaluator:
    """Independent executor for the rule subset the templates use."""

    def __init__(self, columns, rows):
        self.columns = columns
        self.rows = rows

    def colidx(self, node):
        assert node[0] == "col"
        return self.columns.index(node[1])

    def cell_scalar(self, r, c):
        kind, v = coerce(self.rows[r][c])
        if kind in ("num", "date"):
            return (kind, v)
        n = extract_number(self.rows[r][c])
        return ("num", n) if n is not None else None

    def scalar(self, node, ctx):
        if node[0] == "val":
            if ctx == "string":
                return ("text", normalize(node[1]))
            kind, v = coerce(node[1])
            if kind in ("num", "date"):
                return (kind, v)
            n = extract_number(node[1])
            assert n is not None, f"no numeric reading: {node[1]}"
            return ("num", n)
        out = self.eval(node)
        if ctx == "string":
            assert out[0] == "text", out
        return out

    def num_pred(self, op, cell, v):
        if cell is None or cell[0] != v[0]:
            return False
        a, b = cell[1], v[1]
        if cell[0] == "num":
            if num_eq(a, b):
                o = 0
            else:
                o = -1 if a < b else 1
        else:
            o = -1 if a < b else (0 if a == b else 1)
        return {"eq": o == 0, "not_eq": o != 0, "less": o < 0,
                "less_eq": o <= 0, "greater": o > 0, "greater_eq": o >= 0}[op]

    def eval(self, node):
        tag, name, kids = node
        assert tag == "rule"
        if name == "all_rows":
            return ("rows", list(range(len(self.rows))))
        if name == "and":
            a = self.eval(kids[0])[1]
            b = self.eval(kids[1])[1]
            return ("bool", a and b)
        if name in ("eq", "greater", "less"):
            a = self.scalar(kids[0], "numeric")
            b = self.scalar(kids[1], "numeric")
            assert a[0] == b[0], (a, b)
            if a[0] == "num":
                o = 0 if num_eq(a[1], b[1]) else (-1 if a[1] < b[1] else 1)
            else:
                o = -1 if a[1] < b[1] else (0 if a[1] == b[1] else 1)
            return ("bool", {"eq": o == 0, "greater": o > 0, "less": o < 0}[name])
        if name == "str_eq":
            a = self.scalar(kids[0], "string")[1]
            b = self.scalar(kids[1], "string")[1]
            return ("bool", a == b or a in b or b in a)
        if name.startswith(("most_", "all_")) and "str" not in name:
            quant, op = name.split("_", 1)
            rows = self.eval(kids[0])[1]
            assert rows, "quantifier over empty view"
            c = self.colidx(kids[1])
            v = self.scalar(kids[2], "numeric")
            hits = sum(1 for r in rows if self.num_pred(op, self.cell_scalar(r, c), v))
            return ("bool", hits == len(rows) if quant == "all" else hits * 2 > len(rows))
        if name in ("most_str_eq", "all_str_eq"):
            rows = self.eval(kids[0])[1]
            assert rows, "quantifier over empty view"
            c = self.colidx(kids[1])
            v = self.scalar(kids[2], "string")[1]
            hits = sum(1 for r in rows if v in normalize(self.rows[r][c]))
            return ("bool", hits == len(rows) if name.startswith("all") else hits * 2 > len(rows))
        if name == "filter_str_eq":
            rows = self.eval(kids[0])[1]
            c = self.colidx(kids[1])
            v = self.scalar(kids[2], "string")[1]
            return ("rows", [r for r in rows if v in normalize(self.rows[r][c])])
        if name.startswith("filter_"):
            op = name[len("filter_"):]
            rows = self.eval(kids[0])[1]
            c = self.colidx(kids[1])
            v = self.scalar(kids[2], "numeric")
            return ("rows", [r for r in rows if self.num_pred(op, self.cell_scalar(r, c), v)])
        if name == "count":
            return ("num", float(len(self.eval(kids[0])[1])))
        if name in ("avg", "sum"):
            rows = self.eval(kids[0])[1]
            assert rows, "aggregate over empty view"
            c = self.colidx(kids[1])
            vals = []
            for r in rows:
                kind, v = coerce(self.rows[r][c])
                assert kind != "date", "avg/sum over dates"
                n = v if kind == "num" else extract_number(self.rows[r][c])
                assert n is not None
                vals.append(n)
            s = sum(vals)
            return ("num", s if name == "sum" else s / len(vals))
        if name in ("max", "min"):
            rows = self.eval(kids[0])[1]
            assert rows
            c = self.colidx(kids[1])
            keys = self.order_keys(rows, c)
            pick = max(keys) if name == "max" else min(keys)
            return pick
        if name in ("argmax", "argmin"):
            rows = self.eval(kids[0])[1]
            assert rows
            c = self.colidx(kids[1])
            keys = self.order_keys(rows, c)
            best = 0
            for i in range(1, len(rows)):
                better = keys[i][1] > keys[best][1] if name == "argmax" else keys[i][1] < keys[best][1]
                if better:
                    best = i
            return ("rowidx", rows[best])
        if name in ("num_hop", "str_hop"):
            r = self.eval(kids[0])[1]
            c = self.colidx(kids[1])
            return self.hop(name, r, c)
        if name in ("num_hop_first", "str_hop_first"):
            rows = self.eval(kids[0])[1]
            assert rows, "hop over empty view"
            c = self.colidx(kids[1])
            return self.hop(name, rows[0], c)
        raise AssertionError(f"no semantics for {name}")

    def order_keys(self, rows, c):
        typed = [coerce(self.rows[r][c]) for r in rows]
        if all(k == "date" for k, _ in typed):
            return typed
        out = []
        for r in rows:
            n = extract_number(self.rows[r][c])
            assert n is not None, self.rows[r][c]
            out.append(("num", n))
        return out

    def hop(self, name, r, c):
        cell = self.rows[r][c]
        if name.startswith("str_"):
            return ("text", normalize(cell))
        kind, v = coerce(cell)
        if kind in ("num", "date"):
            return (kind, v)
        n = extract_number(cell)
        assert n is not None, cell
        return ("num", n)


def value_leaves(node, path=()):
    tag = node[0]
    if tag == "val":
        yield path, node[1]
    elif tag == "rule":
        for i, c in enumerate(node[2]):
            yield from value_leaves(c, path + (i,))


def node_at(node, path):
    for i in path:
        node = node[2][i]
    return node


def classify(tree, ev):
    """TAB / INF / AUX for every value leaf, with precedence."""
    out = []
    for path, text in value_leaves(tree):
        norm = normalize(text)
        typed = coerce(text)
        tab = False
        for row in ev.rows:
            for cell in row:
                if norm and norm in normalize(cell):
                    tab = True
                c2 = coerce(cell)
                if typed[0] in ("num", "date") and c2 == typed:
                    tab = True
        if tab:
            out.append((path, text, "TAB"))
            continue
        inf = False
        if path:
            parent = node_at(tree, path[:-1])
            for i, sib in enumerate(parent[2]):
                if i == path[-1] or sib[0] != "rule":
                    continue
                if sib[1] in ("all_rows",) or sib[1].startswith("filter"):
                    continue  # view-kind sibling
                if sib[1] in ("argmax", "argmin"):
                    continue  # row-kind sibling
                try:
                    v = ev.eval(sib)
                except AssertionError:
                    continue
                if v[0] == "num":
                    lit = typed[1] if typed[0] == "num" else extract_number(text)
                    if lit is not None and round_eq(lit, v[1]):
                        inf = True
                elif v[0] == "date":
                    if typed == v:
                        inf = True
                elif v[0] == "text":
                    if norm == v[1] or norm in v[1] or v[1] in norm:
                        inf = True
        out.append((path, text, "INF" if inf else "AUX"))
    return out


# ---- legacy surface rendering

LEGACY_NAME = {
    "str_eq": "eq", "not_str_eq": "not_eq",
    "filter_str_eq": "filter_eq", "filter_str_not_eq": "filter_not_eq",
    "all_str_eq": "all_eq", "all_str_not_eq": "all_not_eq",
    "most_str_eq": "most_eq", "most_str_not_eq": "most_not_eq",
    "num_hop": "hop", "str_hop": "hop",
    "num_hop_first": "hop", "str_hop_first": "hop",
}


def legacy_text(node):
    tag = node[0]
    if tag in ("col", "val"):
        return node[1]
    name = LEGACY_NAME.get(node[1], node[1])
    if not node[2]:
        return name
    return name + " { " + " ; ".join(legacy_text(c) for c in node[2]) + " }"


def uses_view_hop(node):
    if node[0] != "rule":
        return False
    if node[1] in ("num_hop_first", "str_hop_first"):
        return True
    return any(uses_view_hop(c) for c in node[2])


# ---- table material

TEAMS = [
    "new york giants", "atlanta falcons", "new orleans saints",
    "pittsburgh steelers", "dallas cowboys", "washington redskins",
    "chicago bears", "green bay packers", "detroit lions",
    "st louis cardinals", "cleveland browns", "denver broncos",
]
DRIVERS = [
    "alain prost", "nelson piquet", "nigel mansell", "ayrton senna",
    "keke rosberg", "michele alboreto", "rene arnoux", "jacques laffite",
    "elio de angelis", "patrick tambay",
]
CONSTRUCTORS = [
    "mclaren - tag", "williams - honda", "ferrari", "lotus - renault",
    "brabham - bmw", "ligier - renault",
]
PLAYERS = [
    "severiano ballesteros", "bernhard langer", "sandy lyle", "ian woosnam",
    "nick faldo", "greg norman", "payne stewart", "fred couples",
    "curtis strange", "mark calcavecchia",
]
COUNTRIES = [
    "spain", "west germany", "scotland", "wales", "england", "australia",
    "united states", "ireland", "south africa", "zimbabwe",
]
ALBUMS = [
    "moonlight serenade", "river of gold", "electric horizon", "paper lanterns",
    "midnight harvest", "glass gardens", "northern lights", "silver thread",
    "velvet morning", "iron and ivy", "salt and smoke", "amber waves",
]
LABELS = ["columbia", "decca", "parlophone", "atlantic", "chess", "verve"]
EPISODES = [
    "the long road", "ashes and echoes", "a quiet harbor", "the winter king",
    "letters home", "the glass door", "blood and brass", "low tide",
    "the empty chair", "night crossing", "the last ferry", "stone lanterns",
]
DIRECTORS = [
    "james burrows", "pamela fryman", "betty thomas", "rob bowman",
    "michelle maclaren", "jack bender",
]
CITIES = ["philadelphia", "chicago", "detroit", "cleveland", "baltimore"]
MONTH_NAMES = ["september", "october", "november", "december"]


def money(rng, lo, hi, step=100):
    return rng.randrange(lo // step, hi // step) * step


def fresh_date(rng, year, used):
    while True:
        m = rng.choice(MONTH_NAMES)
        d = rng.randrange(1, 29)
        s = f"{m} {d} , {year}"
        if s not in used:
            used.add(s)
            return s


def football_table(rng, nrows, wins):
    year = rng.randrange(1968, 1990)
    caption = f"{year} {rng.choice(CITIES)} eagles season"
    columns = ["opponent", "result", "attendance", "date"]
    opponents = rng.sample(TEAMS, nrows)
    used_dates = set()
    rows = []
    flags = [True] * wins + [False] * (nrows - wins)
    rng.shuffle(flags)
    for i in range(nrows):
        a, b = rng.randrange(10, 42), rng.randrange(0, 24)
        hi, lo = max(a, b), min(a, b)
        if hi == lo:
            hi += 3
        res = f"w {hi}-{lo}" if flags[i] else f"l {lo}-{hi}"
        rows.append([
            opponents[i], res, str(money(rng, 21000, 79000)),
            fresh_date(rng, year, used_dates),
        ])
    return caption, columns, rows, flags


def race_table(rng, nrows, lead_laps):
    year = rng.randrange(1980, 1992)
    caption = f"{year} {rng.choice(['brazilian', 'belgian', 'italian', 'french'])} grand prix"
    columns = ["driver", "constructor", "laps", "grid"]
    drivers = rng.sample(DRIVERS, nrows)
    grids = rng.sample(range(1, 25), nrows)
    majority = nrows // 2 + 1
    rows = []
    for i in range(nrows):
        laps = lead_laps if i < majority else lead_laps - rng.randrange(1, 9)
        rows.append([drivers[i], rng.choice(CONSTRUCTORS), str(laps), str(grids[i])])
    rng.shuffle(rows)
    return caption, columns, rows, lead_laps


def golf_table(rng, nrows):
    year = rng.randrange(1979, 1995)
    caption = f"{year} {rng.choice(['memorial', 'heritage', 'colonial', 'byron nelson'])} classic"
    columns = ["player", "country", "score", "money"]
    players = rng.sample(PLAYERS, nrows)
    scores = rng.sample(range(268, 292), nrows)
    rows = []
    for i in range(nrows):
        rows.append([
            players[i], rng.choice(COUNTRIES), str(scores[i]),
            str(money(rng, 12000, 95000)),
        ])
    return caption, columns, rows


def album_table(rng, nrows, top_label):
    year0 = rng.randrange(1958, 1984)
    caption = f"{rng.choice(['etta hayes', 'ray donovan', 'the marlowes', 'june carlisle'])} discography"
    columns = ["album", "year", "label", "weeks on chart"]
    albums = rng.sample(ALBUMS, nrows)
    majority = nrows // 2 + 1
    rows = []
    weeks = rng.sample(range(4, 52), nrows)
    for i in range(nrows):
        label = top_label if i < majority else rng.choice([l for l in LABELS if l != top_label])
        rows.append([albums[i], str(year0 + i), label, str(weeks[i])])
    rng.shuffle(rows)
    return caption, columns, rows


def tv_table(rng, nrows):
    season = rng.randrange(1, 9)
    caption = f"{rng.choice(['harbor lights', 'north of nowhere', 'the precinct', 'cedar falls'])} season {season}"
    columns = ["title", "directed by", "us viewers (millions)", "original air date"]
    titles = rng.sample(EPISODES, nrows)
    year = rng.randrange(1998, 2014)
    used_dates = set()
    rows = []
    viewers = rng.sample(range(31, 139), nrows)
    for i in range(nrows):
        rows.append([
            titles[i], rng.choice(DIRECTORS), f"{viewers[i] / 10:.1f}",
            fresh_date(rng, year, used_dates),
        ])
    return caption, columns, rows


def table_texts(rows):
    return [cell for row in rows for cell in row]


def not_in_table(value_text, rows):
    norm = normalize(value_text)
    typed = coerce(value_text)
    for cell in table_texts(rows):
        if norm and norm in normalize(cell):
            return False
        if typed[0] in ("num", "date") and coerce(cell) == typed:
            return False
    return True


def check_record(columns, rows, tree, want_classes, want_view_hop):
    ev = Evaluator(columns, rows)
    out = ev.eval(tree)
    assert out == ("bool", True), f"statement not true: {out}"
    got = [c for (_, _, c) in classify(tree, ev)]
    assert got == want_classes, f"classes {got} != {want_classes}"
    assert uses_view_hop(tree) == want_view_hop
    return True


def t1_record(rng, k):
    """eq { <avg|sum> { filter(str)_eq { all_rows ; colT ; vTAB } ; colN } ; vINF }"""
    agg = "avg" if k % 2 == 0 else "sum"
    for _attempt in range(200):
        nrows = rng.randrange(5, 9)
        wins = rng.randrange(3, nrows)
        caption, columns, rows, flags = football_table(rng, nrows, wins)
        # Force a clean aggregate over the winning rows.
        target_avg = money(rng, 30000, 70000)
        win_rows = [i for i, f in enumerate(flags) if f]
        vals = [target_avg + d * 1000 for d in range(len(win_rows))]
        shift = (len(vals) - 1) * 1000 // 2
        vals = [v - (shift // 100) * 100 for v in vals]
        total = len(win_rows) * target_avg
        vals[-1] += total - sum(vals)
        if any(v <= 0 for v in vals):
            continue
        for r, v in zip(win_rows, vals):
            rows[r][2] = str(v)
        answer = total if agg == "sum" else target_avg
        v_inf = str(int(answer))
        tree = rule(
            "eq",
            rule(agg,
                 rule("filter_str_eq", rule("all_rows"), col("result"), val("w")),
                 col("attendance")),
            val(v_inf),
        )
        if not not_in_table(v_inf, rows):
            continue
        try:
            check_record(columns, rows, tree, ["TAB", "INF"], False)
        except AssertionError:
            continue
        word = "average" if agg == "avg" else "combined"
        sent = f"the {word} attendance across the team 's wins was {v_inf} ."
        return caption, columns, rows, tree, sent
    raise RuntimeError("t1 generation failed")


def t2_record(rng, k):
    """eq/str_eq { hop_first { filter ; col } ; vTAB } with numeric, date and text hops."""
    flavor = ["num", "num", "num", "num", "num", "date", "date", "date", "date",
              "text", "text", "text"][k]
    for _attempt in range(200):
        nrows = rng.randrange(5, 9)
        wins = rng.randrange(2, nrows - 1)
        caption, columns, rows, flags = football_table(rng, nrows, wins)
        first_win = flags.index(True)
        if flavor == "num":
            picked = rows[first_win][2]
            tree = rule(
                "eq",
                rule("num_hop_first",
                     rule("filter_str_eq", rule("all_rows"), col("result"), val("w")),
                     col("attendance")),
                val(picked),
            )
            sent = f"the first win drew a crowd of {picked} ."
        elif flavor == "date":
            picked = rows[first_win][3]
            tree = rule(
                "eq",
                rule("num_hop_first",
                     rule("filter_str_eq", rule("all_rows"), col("result"), val("w")),
                     col("date")),
                val(picked),
            )
            sent = f"the team 's first win came on {picked} ."
        else:
            picked = rows[first_win][0]
            tree = rule(
                "str_eq",
                rule("str_hop_first",
                     rule("filter_str_eq", rule("all_rows"), col("result"), val("w")),
                     col("opponent")),
                val(picked),
            )
            sent = f"the first win of the season came against the {picked} ."
        try:
            check_record(columns, rows, tree, ["TAB", "TAB"], True)
        except AssertionError:
            continue
        return caption, columns, rows, tree, sent
    raise RuntimeError("t2 generation failed")


def t3_record(rng, k):
    """and { greater { avg { all_rows ; colN } ; vAUX } ; most_str_eq { ... ; vTAB } }"""
    for _attempt in range(300):
        nrows = rng.randrange(5, 9)
        top_label = LABELS[k % len(LABELS)]
        caption, columns, rows = album_table(rng, nrows, top_label)
        weeks = [int(r[3]) for r in rows]
        mean = sum(weeks) / len(weeks)
        guess = int(mean * 0.7)
        # Auxiliary: below the mean, outside tolerance, absent from the table.
        ok = guess >= 1 and not round_eq(guess, mean) and guess < mean
        if not ok or not not_in_table(str(guess), rows):
            continue
        tree = rule(
            "and",
            rule("greater",
                 rule("avg", rule("all_rows"), col("weeks on chart")),
                 val(str(guess))),
            rule("most_str_eq", rule("all_rows"), col("label"), val(top_label)),
        )
        try:
            check_record(columns, rows, tree, ["AUX", "TAB"], False)
        except AssertionError:
            continue
        sent = (f"the albums stayed on the chart more than {guess} weeks on average , "
                f"and most of them came out on {top_label} .")
        return caption, columns, rows, tree, sent
    raise RuntimeError("t3 generation failed")


def t4_record(rng, k):
    """and { (str_)eq { hop { arg(max|min) ; colX } ; vTAB } ; most_(str_)eq { ... ; vTAB } }"""
    numeric_most = k % 3 == 0
    use_min = k % 2 == 1
    for _attempt in range(300):
        nrows = rng.randrange(5, 9)
        if numeric_most:
            lead_laps = rng.randrange(52, 80)
            caption, columns, rows, lead = race_table(rng, nrows, lead_laps)
            grids = [int(r[3]) for r in rows]
            target = grids.index(min(grids) if use_min else max(grids))
            picked = rows[target][0]
            arg = "argmin" if use_min else "argmax"
            tree = rule(
                "and",
                rule("str_eq",
                     rule("str_hop", rule(arg, rule("all_rows"), col("grid")), col("driver")),
                     val(picked)),
                rule("most_eq", rule("all_rows"), col("laps"), val(str(lead))),
            )
            sent = (f"{picked} started {'closest to the front' if use_min else 'furthest back'} , "
                    f"while most drivers completed {lead} laps .")
        else:
            caption, columns, rows = golf_table(rng, nrows)
            prize = [int(r[3]) for r in rows]
            target = prize.index(min(prize) if use_min else max(prize))
            picked = rows[target][0]
            arg = "argmin" if use_min else "argmax"
            # Majority country for the most-branch.
            majority = nrows // 2 + 1
            country = rng.choice(COUNTRIES)
            others = [c for c in COUNTRIES if c != country]
            for i in range(nrows):
                rows[i][1] = country if i < majority else rng.choice(others)
            rng.shuffle(rows)
            prize = [int(r[3]) for r in rows]
            target = prize.index(min(prize) if use_min else max(prize))
            picked = rows[target][0]
            tree = rule(
                "and",
                rule("str_eq",
                     rule("str_hop", rule(arg, rule("all_rows"), col("money")), col("player")),
                     val(picked)),
                rule("most_str_eq", rule("all_rows"), col("country"), val(country)),
            )
            sent = (f"{picked} took home the {'smallest' if use_min else 'biggest'} payout , "
                    f"and most of the field came from {country} .")
        try:
            check_record(columns, rows, tree, ["TAB", "TAB"], False)
        except AssertionError:
            continue
        return caption, columns, rows, tree, sent
    raise RuntimeError("t4 generation failed")


def main():
    rng = random.Random(20240817)
    records = []
    class_totals = {"TAB": 0, "INF": 0, "AUX": 0}
    view_hops = 0

    builders = [(t1_record, 21), (t2_record, 12), (t3_record, 7), (t4_record, 10)]
    for builder, count in builders:
        for k in range(count):
            caption, columns, rows, tree, sent = builder(rng, k)
            ev = Evaluator(columns, rows)
            for (_, _, c) in classify(tree, ev):
                class_totals[c] += 1
            if uses_view_hop(tree):
                view_hops += 1
            records.append({
                "topic": caption,
                "table_header": columns,
                "table_cont": rows,
                "sent": sent,
                "logic_str": legacy_text(tree) + " = true",
                "interest_rating": round(rng.uniform(1.0, 5.0), 1),
            })

    assert len(records) == 50, len(records)
    assert class_totals == {"TAB": 72, "INF": 21, "AUX": 7}, class_totals
    assert view_hops == 12, view_hops

    rng.shuffle(records)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w") as f:
        json.dump(records, f, indent=1)
        f.write("\n")
    print(f"wrote {len(records)} records to {OUT}")
    print(f"value classes: {class_totals}, view hops: {view_hops}")


if __name__ == "__main__":
    main()
