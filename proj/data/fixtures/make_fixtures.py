#!/usr/bin/env python3
"""Writes worked_examples.jsonl: hand-encoded prediction/truth pairs with
the removals, expected membership and expected rendering.

A node is N(label, *parts); a part is a child node or a literal token owned
by the node. L(text) is a one-token leaf labelled by its text. Spans follow
from token order. Predicted leaves get an nll; truth trees carry none.
"""

import json
import pathlib


class N:
    def __init__(self, label, *parts, nll=None, remove=False):
        self.label = label
        self.parts = list(parts)
        self.nll = nll
        self.remove = remove

    def rm(self):
        self.remove = True
        return self


def L(text, nll=0.05):
    node = N(text, text)
    node.nll = nll
    return node


def emit(node, tokens, scored):
    begin = len(tokens)
    out = {"label": node.label}
    kids = []
    for part in node.parts:
        if isinstance(part, str):
            tokens.append(part)
        else:
            kids.append(emit(part, tokens, scored))
    out["span"] = [begin, len(tokens)]
    if kids:
        out["children"] = kids
    elif scored:
        out["nll"] = node.nll
    if node.remove:
        out["remove"] = True
    return out


def tree(root, scored):
    tokens = []
    j = emit(root, tokens, scored)
    return {"tokens": tokens, "root": j}


def table(name, kw, alias, nll=0.05):
    return N("table", L(name, nll), kw, L(alias, nll))


def eq(lhs, rhs, op="=", nll=0.05):
    return N(op, L(lhs, nll), op, L(rhs, nll))


def count_star():
    return N("count", "COUNT", "(", L("*"), ")")


def call(name, *args):
    parts = [name if isinstance(name, N) else L(name), "("]
    for i, a in enumerate(args):
        if i:
            parts.append(",")
        parts.append(a)
    parts.append(")")
    return N("call", *parts)


def binop(op, lhs, rhs):
    return N(op, lhs, op, rhs)


def sql_join_args():
    def query(join):
        return N("query",
                 N("select", "SELECT", count_star()),
                 N("from", "FROM", table("countries", "AS", "t1"), join),
                 N("where", "WHERE", eq("t1.countryname", '"usa"')),
                 ";")

    predicted = query(N("join", "JOIN",
                        table("car_makers", "as", "t2", nll=1.4).rm(), "on",
                        eq("t1.countryid", "t2.country", nll=0.9).rm()))
    truth = query(N("join", "JOIN", table("car_makers", "AS", "t2"), "on",
                    eq("t1.countryid", "t2.country"), "JOIN",
                    table("model_list", "as", "t3"), "on", eq("t2.id", "t3.maker")))
    return dict(id="sql-join-args", m=2, expect_contains=True,
                expect_render='SELECT COUNT(*) FROM countries AS t1 JOIN ?? on ?? '
                              'WHERE t1.countryname = "usa";',
                caption="SQL, two holes at the JOIN arguments; set contains the truth",
                predicted=predicted, truth=truth)


def sql_where_group():
    def query(year, group_col):
        return N("query",
                 N("select", "SELECT", L("t1.name"), ",", L("t1.capacity")),
                 N("from", "FROM", table("stadium", "AS", "t1"),
                   N("join", "JOIN", table("concert", "AS", "t2"), "ON",
                     eq("t1.stadium_id", "t2.stadium_id"))),
                 N("where", "WHERE", N(">", L("t2.year"), ">", year)),
                 N("group_by", "GROUP", "BY", group_col),
                 N("order_by", "ORDER", "BY", count_star(), L("DESC")),
                 N("limit", "LIMIT", L("1")),
                 ";")

    predicted = query(L("2013", 1.7).rm(), L("t2.stadium_id", 1.1).rm())
    truth = query(L("2014"), L("t1.stadium_id"))
    return dict(id="sql-where-group", m=2, expect_contains=True,
                expect_render="SELECT t1.name, t1.capacity FROM stadium AS t1 "
                              "JOIN concert AS t2 ON t1.stadium_id = t2.stadium_id "
                              "WHERE t2.year > ?? GROUP BY ?? ORDER BY COUNT(*) DESC LIMIT 1;",
                caption="SQL, holes at the WHERE literal and the GROUP BY column",
                predicted=predicted, truth=truth)


def fib_line(a, b):
    return N("return", "return",
             binop("+", call("fib", binop("-", L("n"), a)), call("fib", binop("-", L("n"), b))))


def fib_one_hole():
    first = binop("-", L("n"), L("0", 1.5)).rm()
    predicted = N("return", "return",
                  binop("+", call("fib", first), call("fib", binop("-", L("n"), L("3", 1.2)))))
    truth = fib_line(L("1"), L("2"))
    return dict(id="fib-one-hole", m=1, expect_contains=False,
                expect_render="return fib(??) + fib(n-3)",
                caption="Python, one hole; set misses the truth",
                predicted=predicted, truth=truth)


def fib_two_holes():
    predicted = fib_line(L("0", 1.5).rm(), L("3", 1.2).rm())
    truth = fib_line(L("1"), L("2"))
    return dict(id="fib-two-holes", m=2, expect_contains=True,
                expect_render="return fib(n-??) + fib(n-??)",
                caption="Python, two holes at the subtracted literals; set contains the truth",
                predicted=predicted, truth=truth)


def sorted_three_holes():
    def key_lambda(body, param):
        return N("keyword", L("key"), "=", N("lambda", "lambda", param, ":", body))

    len_set = call("len", call("set", L("x")))
    predicted = N("return", "return",
                  call(L("max", 1.6).rm(), L("words"),
                       key_lambda(N(len_set.label, *len_set.parts).rm(),
                                  N("arguments", L("x", 0.8)).rm())))
    body = N("tuple", "(", N("neg", "-", call("len", call("set", L("x")))), ",", L("x"), ")")
    truth = N("return", "return",
              N("subscript", call("sorted", L("words"), key_lambda(body, N("arguments", L("x")))),
                "[", L("0"), "]"))
    return dict(id="sorted-three-holes", m=3, expect_contains=True,
                expect_render="return ??(words, key=lambda : ??)",
                caption="Python, three holes; stated to contain the truth",
                predicted=predicted, truth=truth)


def main():
    out = pathlib.Path(__file__).with_name("worked_examples.jsonl")
    lines = []
    for make in (sql_join_args, sql_where_group, fib_one_hole, fib_two_holes, sorted_three_holes):
        f = make()
        record = {"id": f["id"], "caption": f["caption"], "m": f["m"],
                  "expect_contains": f["expect_contains"], "expect_render": f["expect_render"],
                  "predicted": tree(f["predicted"], True), "truth": tree(f["truth"], False)}
        lines.append(json.dumps(record))
    out.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
