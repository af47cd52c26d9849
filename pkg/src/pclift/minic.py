"""Parser and linker for a small C subset.

The language covers what calibration-parameter product lines need:
enum declarations, global variables (``extern``/``const``, types ``int``,
``bool``, ``enum <name>``), class-like containers, and function definitions
with the usual statement forms.  Every identifier use must resolve to a
declaration; ``extern`` declarations link to same-named definitions across
translation units.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class MiniCError(Exception):
    pass


class MiniCSyntaxError(MiniCError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnresolvedIdentifierError(MiniCError):
    def __init__(self, name, line, col):
        super().__init__(f"unresolved identifier {name!r} (line {line}, column {col})")
        self.name = name
        self.line = line
        self.col = col


# --------------------------------------------------------------------------
# AST

Pos = tuple[int, int]


@dataclass(frozen=True)
class TypeRef:
    name: str
    is_enum: bool = False


@dataclass
class EnumDecl:
    name: str
    members: list[str]
    pos: Pos


@dataclass
class VarDecl:
    name: str
    type: TypeRef
    extern: bool
    const: bool
    init: "Expr | None"
    pos: Pos


@dataclass
class Param:
    name: str
    type: TypeRef
    pos: Pos


@dataclass
class FuncDef:
    name: str
    return_type: TypeRef
    params: list[Param]
    body: "Block"
    pos: Pos


@dataclass
class ClassDecl:
    name: str
    members: list["VarDecl | FuncDef"]
    pos: Pos


@dataclass
class Unit:
    path: str
    items: list["EnumDecl | ClassDecl | FuncDef | VarDecl"]


# Statements


@dataclass
class Block:
    stmts: list["Stmt"]
    pos: Pos


@dataclass
class DeclStmt:
    decl: VarDecl
    pos: Pos


@dataclass
class AssignStmt:
    target: "Name"
    op: str  # =, +=, -=, *=, /=, %=
    value: "Expr"
    pos: Pos


@dataclass
class ExprStmt:
    expr: "Expr"
    pos: Pos


@dataclass
class If:
    cond: "Expr"
    then: "Stmt"
    els: "Stmt | None"
    pos: Pos


@dataclass
class While:
    cond: "Expr"
    body: "Stmt"
    pos: Pos


@dataclass
class For:
    init: "Stmt | None"
    cond: "Expr | None"
    step: "Stmt | None"
    body: "Stmt"
    pos: Pos


@dataclass
class Case:
    label: "Expr | None"  # None is the default case
    stmts: list["Stmt"]
    pos: Pos


@dataclass
class Switch:
    subject: "Expr"
    cases: list[Case]
    pos: Pos


@dataclass
class Return:
    value: "Expr | None"
    pos: Pos


@dataclass
class Break:
    pos: Pos


@dataclass
class Continue:
    pos: Pos


Stmt = (
    Block
    | DeclStmt
    | AssignStmt
    | ExprStmt
    | If
    | While
    | For
    | Switch
    | Return
    | Break
    | Continue
)


# Expressions


@dataclass
class Name:
    name: str
    pos: Pos
    decl: object = field(default=None, repr=False, compare=False)


@dataclass
class IntLit:
    value: int
    pos: Pos


@dataclass
class BoolLit:
    value: bool
    pos: Pos


@dataclass
class Unary:
    op: str  # !, -, ++, -- (prefix)
    operand: "Expr"
    pos: Pos


@dataclass
class Postfix:
    op: str  # ++, --
    operand: Name
    pos: Pos


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos


@dataclass
class Call:
    callee: Name
    args: list["Expr"]
    pos: Pos


Expr = Name | IntLit | BoolLit | Unary | Postfix | Binary | Call


# --------------------------------------------------------------------------
# Lexer

KEYWORDS = {
    "extern", "const", "int", "bool", "void", "enum", "class", "struct",
    "if", "else", "while", "for", "switch", "case", "default",
    "return", "break", "continue", "true", "false",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>\+\+|--|\+=|-=|\*=|/=|%=|==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){};,:])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, keyword, punct, eof
    text: str
    pos: Pos


def tokenize(text, path="<string>"):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise MiniCSyntaxError(f"unexpected character {text[i]!r}", line, col)
        lexeme = m.group()
        kind = m.lastgroup
        if kind == "ident":
            tokens.append(
                Token("keyword" if lexeme in KEYWORDS else "ident", lexeme, (line, col))
            )
        elif kind in ("num", "punct"):
            tokens.append(Token(kind, lexeme, (line, col)))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        i = m.end()
    tokens.append(Token("eof", "", (line, col)))
    return tokens


# --------------------------------------------------------------------------
# Parser

_COMPARISONS = {"<", "<=", ">", ">=", "==", "!="}


class _Parser:
    def __init__(self, text, path):
        self.tokens = tokenize(text, path)
        self.path = path
        self.i = 0

    # -- token plumbing

    @property
    def cur(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at(self, text):
        return self.cur.text == text and self.cur.kind in ("punct", "keyword")

    def accept(self, text):
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text):
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.cur.text or 'end of input'!r}")
        return self.advance()

    def fail(self, message):
        line, col = self.cur.pos
        raise MiniCSyntaxError(message, line, col)

    # -- declarations

    def parse_unit(self):
        items = []
        while self.cur.kind != "eof":
            items.append(self.parse_top_item())
        return Unit(self.path, items)

    def parse_top_item(self):
        if self.at("enum") and self.tokens[self.i + 2].text == "{":
            return self.parse_enum_decl()
        if self.at("class") or self.at("struct"):
            return self.parse_class_decl()
        return self.parse_var_or_func(allow_func=True)

    def parse_enum_decl(self):
        pos = self.expect("enum").pos
        name = self.expect_ident("enum name")
        self.expect("{")
        members = []
        while not self.at("}"):
            members.append(self.expect_ident("enum member"))
            if self.accept("="):
                if self.cur.kind != "num":
                    self.fail("enum member value must be an integer")
                self.advance()
            if not self.accept(","):
                break
        self.expect("}")
        self.accept(";")
        return EnumDecl(name, members, pos)

    def parse_class_decl(self):
        pos = self.advance().pos  # class or struct
        name = self.expect_ident("class name")
        self.expect("{")
        members = []
        while not self.at("}"):
            members.append(self.parse_var_or_func(allow_func=True))
        self.expect("}")
        self.accept(";")
        return ClassDecl(name, members, pos)

    def parse_var_or_func(self, allow_func):
        pos = self.cur.pos
        extern = const = False
        while True:
            if self.accept("extern"):
                extern = True
            elif self.accept("const"):
                const = True
            else:
                break
        type_ = self.parse_type()
        name = self.expect_ident("declaration name")
        if allow_func and self.at("("):
            if extern or const:
                self.fail("function definitions take no extern/const here")
            return self.parse_func_rest(type_, name, pos)
        init = None
        if self.accept("="):
            init = self.parse_expr()
        self.expect(";")
        return VarDecl(name, type_, extern, const, init, pos)

    def parse_type(self):
        tok = self.cur
        if self.accept("enum"):
            return TypeRef(self.expect_ident("enum type name"), is_enum=True)
        if tok.text in ("int", "bool", "void"):
            self.advance()
            return TypeRef(tok.text)
        self.fail(f"expected a type, found {tok.text!r}")

    def parse_func_rest(self, return_type, name, pos):
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ppos = self.cur.pos
                ptype = self.parse_type()
                pname = self.expect_ident("parameter name")
                params.append(Param(pname, ptype, ppos))
                if not self.accept(","):
                    break
        self.expect(")")
        body = self.parse_block()
        return FuncDef(name, return_type, params, body, pos)

    def expect_ident(self, what):
        if self.cur.kind != "ident":
            self.fail(f"expected {what}, found {self.cur.text or 'end of input'!r}")
        return self.advance().text

    # -- statements

    def parse_block(self):
        pos = self.expect("{").pos
        stmts = []
        while not self.at("}"):
            stmts.append(self.parse_stmt())
        self.expect("}")
        return Block(stmts, pos)

    def parse_stmt(self):
        tok = self.cur
        if self.at("{"):
            return self.parse_block()
        if self.at("if"):
            return self.parse_if()
        if self.at("while"):
            return self.parse_while()
        if self.at("for"):
            return self.parse_for()
        if self.at("switch"):
            return self.parse_switch()
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return Return(value, tok.pos)
        if self.at("break"):
            self.advance()
            self.expect(";")
            return Break(tok.pos)
        if self.at("continue"):
            self.advance()
            self.expect(";")
            return Continue(tok.pos)
        if tok.text in ("extern", "const", "int", "bool", "void", "enum"):
            decl = self.parse_var_or_func(allow_func=False)
            return DeclStmt(decl, decl.pos)
        return self.parse_simple_stmt(require_semi=True)

    def parse_simple_stmt(self, require_semi):
        """Assignment, increment, or call; for-header clauses skip the ';'."""
        pos = self.cur.pos
        if self.cur.kind == "ident" and self.tokens[self.i + 1].text in (
            "=", "+=", "-=", "*=", "/=", "%=",
        ):
            target = Name(self.advance().text, pos)
            op = self.advance().text
            value = self.parse_expr()
            if require_semi:
                self.expect(";")
            return AssignStmt(target, op, value, pos)
        expr = self.parse_expr()
        if require_semi:
            self.expect(";")
        return ExprStmt(expr, pos)

    def parse_if(self):
        pos = self.expect("if").pos
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_stmt()
        els = self.parse_stmt() if self.accept("else") else None
        return If(cond, then, els, pos)

    def parse_while(self):
        pos = self.expect("while").pos
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        return While(cond, self.parse_stmt(), pos)

    def parse_for(self):
        pos = self.expect("for").pos
        self.expect("(")
        init = None
        if not self.at(";"):
            if self.cur.text in ("int", "bool", "enum", "const"):
                decl = self.parse_var_or_func(allow_func=False)
                init = DeclStmt(decl, decl.pos)
            else:
                init = self.parse_simple_stmt(require_semi=True)
        else:
            self.expect(";")
        cond = None
        if not self.at(";"):
            cond = self.parse_expr()
        self.expect(";")
        step = None
        if not self.at(")"):
            step = self.parse_simple_stmt(require_semi=False)
        self.expect(")")
        return For(init, cond, step, self.parse_stmt(), pos)

    def parse_switch(self):
        pos = self.expect("switch").pos
        self.expect("(")
        subject = self.parse_expr()
        self.expect(")")
        self.expect("{")
        cases = []
        while not self.at("}"):
            cpos = self.cur.pos
            if self.accept("case"):
                label = self.parse_expr()
            elif self.accept("default"):
                label = None
            else:
                self.fail("expected 'case' or 'default'")
            self.expect(":")
            stmts = []
            while not (self.at("case") or self.at("default") or self.at("}")):
                stmts.append(self.parse_stmt())
            cases.append(Case(label, stmts, cpos))
        self.expect("}")
        return Switch(subject, cases, pos)

    # -- expressions (precedence climbing)

    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        expr = self.parse_and()
        while self.at("||"):
            pos = self.advance().pos
            expr = Binary("||", expr, self.parse_and(), pos)
        return expr

    def parse_and(self):
        expr = self.parse_equality()
        while self.at("&&"):
            pos = self.advance().pos
            expr = Binary("&&", expr, self.parse_equality(), pos)
        return expr

    def parse_equality(self):
        expr = self.parse_relational()
        while self.cur.text in ("==", "!="):
            op = self.advance()
            expr = Binary(op.text, expr, self.parse_relational(), op.pos)
        return expr

    def parse_relational(self):
        expr = self.parse_additive()
        while self.cur.text in ("<", "<=", ">", ">="):
            op = self.advance()
            expr = Binary(op.text, expr, self.parse_additive(), op.pos)
        return expr

    def parse_additive(self):
        expr = self.parse_multiplicative()
        while self.cur.kind == "punct" and self.cur.text in ("+", "-"):
            op = self.advance()
            expr = Binary(op.text, expr, self.parse_multiplicative(), op.pos)
        return expr

    def parse_multiplicative(self):
        expr = self.parse_unary()
        while self.cur.kind == "punct" and self.cur.text in ("*", "/", "%"):
            op = self.advance()
            expr = Binary(op.text, expr, self.parse_unary(), op.pos)
        return expr

    def parse_unary(self):
        tok = self.cur
        if tok.text in ("!", "-", "++", "--") and tok.kind == "punct":
            self.advance()
            operand = self.parse_unary()
            if tok.text in ("++", "--") and not isinstance(operand, Name):
                self.fail(f"{tok.text} needs a variable")
            return Unary(tok.text, operand, tok.pos)
        return self.parse_postfix()

    def parse_postfix(self):
        expr = self.parse_primary()
        while self.cur.text in ("++", "--") and self.cur.kind == "punct":
            if not isinstance(expr, Name):
                self.fail(f"{self.cur.text} needs a variable")
            op = self.advance()
            expr = Postfix(op.text, expr, op.pos)
        return expr

    def parse_primary(self):
        tok = self.cur
        if self.accept("("):
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if tok.kind == "num":
            self.advance()
            return IntLit(int(tok.text), tok.pos)
        if tok.text in ("true", "false"):
            self.advance()
            return BoolLit(tok.text == "true", tok.pos)
        if tok.kind == "ident":
            name = Name(self.advance().text, tok.pos)
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                return Call(name, args, tok.pos)
            return name
        self.fail(f"expected an expression, found {tok.text or 'end of input'!r}")


# --------------------------------------------------------------------------
# Declarations as resolution targets


@dataclass(frozen=True)
class Entity:
    """A declared thing with a stable, scope-qualified identifier."""

    id: str
    kind: str  # FILE, CLASS, FUNCTION, VARIABLE, ENUM, ENUM_LITERAL, PARAM
    unit: str
    name: str


class _UnitScope:
    """Per-unit symbol tables built during parse, used to validate uses."""

    def __init__(self, unit):
        self.unit = unit
        self.enums: dict[str, EnumDecl] = {}
        self.enum_literals: dict[str, EnumDecl] = {}
        self.globals: dict[str, VarDecl] = {}
        self.functions: dict[str, FuncDef] = {}
        self.classes: dict[str, ClassDecl] = {}
        for item in unit.items:
            if isinstance(item, EnumDecl):
                self.enums[item.name] = item
                for member in item.members:
                    self.enum_literals[member] = item
            elif isinstance(item, VarDecl):
                self.globals[item.name] = item
            elif isinstance(item, FuncDef):
                self.functions[item.name] = item
            elif isinstance(item, ClassDecl):
                self.classes[item.name] = item
                for member in item.members:
                    if isinstance(member, FuncDef):
                        self.functions[member.name] = member


def _check_unit_resolution(unit):
    """Every identifier use must bind to something visible in this unit."""
    scope = _UnitScope(unit)

    def visible(name, locals_stack, class_decl):
        for frame in reversed(locals_stack):
            if name in frame:
                return True
        if class_decl is not None:
            for member in class_decl.members:
                if isinstance(member, VarDecl) and member.name == name:
                    return True
        return (
            name in scope.globals
            or name in scope.functions
            or name in scope.enum_literals
        )

    def check_expr(expr, locals_stack, class_decl):
        if isinstance(expr, Name):
            if not visible(expr.name, locals_stack, class_decl):
                line, col = expr.pos
                raise UnresolvedIdentifierError(expr.name, line, col)
        elif isinstance(expr, (Unary, Postfix)):
            check_expr(expr.operand, locals_stack, class_decl)
        elif isinstance(expr, Binary):
            check_expr(expr.left, locals_stack, class_decl)
            check_expr(expr.right, locals_stack, class_decl)
        elif isinstance(expr, Call):
            if not visible(expr.callee.name, locals_stack, class_decl):
                line, col = expr.callee.pos
                raise UnresolvedIdentifierError(expr.callee.name, line, col)
            for arg in expr.args:
                check_expr(arg, locals_stack, class_decl)

    def check_stmt(stmt, locals_stack, class_decl):
        if isinstance(stmt, Block):
            locals_stack.append(set())
            for inner in stmt.stmts:
                check_stmt(inner, locals_stack, class_decl)
            locals_stack.pop()
        elif isinstance(stmt, DeclStmt):
            if stmt.decl.init is not None:
                check_expr(stmt.decl.init, locals_stack, class_decl)
            locals_stack[-1].add(stmt.decl.name)
        elif isinstance(stmt, AssignStmt):
            check_expr(stmt.target, locals_stack, class_decl)
            check_expr(stmt.value, locals_stack, class_decl)
        elif isinstance(stmt, ExprStmt):
            check_expr(stmt.expr, locals_stack, class_decl)
        elif isinstance(stmt, If):
            check_expr(stmt.cond, locals_stack, class_decl)
            check_stmt(stmt.then, locals_stack, class_decl)
            if stmt.els is not None:
                check_stmt(stmt.els, locals_stack, class_decl)
        elif isinstance(stmt, While):
            check_expr(stmt.cond, locals_stack, class_decl)
            check_stmt(stmt.body, locals_stack, class_decl)
        elif isinstance(stmt, For):
            locals_stack.append(set())
            if stmt.init is not None:
                check_stmt(stmt.init, locals_stack, class_decl)
            if stmt.cond is not None:
                check_expr(stmt.cond, locals_stack, class_decl)
            if stmt.step is not None:
                check_stmt(stmt.step, locals_stack, class_decl)
            check_stmt(stmt.body, locals_stack, class_decl)
            locals_stack.pop()
        elif isinstance(stmt, Switch):
            check_expr(stmt.subject, locals_stack, class_decl)
            for case in stmt.cases:
                if case.label is not None:
                    check_expr(case.label, locals_stack, class_decl)
                locals_stack.append(set())
                for inner in case.stmts:
                    check_stmt(inner, locals_stack, class_decl)
                locals_stack.pop()
        elif isinstance(stmt, Return):
            if stmt.value is not None:
                check_expr(stmt.value, locals_stack, class_decl)

    def check_func(func, class_decl):
        frame = {p.name for p in func.params}
        check_stmt(func.body, [frame], class_decl)

    for item in unit.items:
        if isinstance(item, VarDecl) and item.init is not None:
            check_expr(item.init, [set()], None)
        elif isinstance(item, FuncDef):
            check_func(item, None)
        elif isinstance(item, ClassDecl):
            for member in item.members:
                if isinstance(member, VarDecl) and member.init is not None:
                    check_expr(member.init, [set()], item)
                elif isinstance(member, FuncDef):
                    check_func(member, item)


def parse_mini_c(text, path="<string>"):
    """Parse one translation unit and validate identifier resolution."""
    unit = _Parser(text, path).parse_unit()
    _check_unit_resolution(unit)
    return unit


# --------------------------------------------------------------------------
# Linking


@dataclass
class LinkedProgram:
    """Units plus cross-unit symbol information and entity identities."""

    units: list[Unit]
    # global variable name -> (defining unit path, VarDecl); externs resolved
    global_defs: dict[str, tuple[str, VarDecl]]
    # function name -> (unit path, optional class name, FuncDef)
    functions: dict[str, tuple[str, str | None, FuncDef]]
    # enum type name -> (unit path, EnumDecl); merged by name
    enums: dict[str, tuple[str, EnumDecl]]
    # enum literal -> enum type name
    enum_literal_types: dict[str, str]

    def global_entity_id(self, name):
        unit_path, _ = self.global_defs[name]
        return f"{unit_path}#{name}"

    def function_entity_id(self, name):
        unit_path, class_name, _ = self.functions[name]
        if class_name:
            return f"{unit_path}#{class_name}#{name}"
        return f"{unit_path}#{name}"


def link(units):
    """Resolve externs to definitions by exact name across the unit set.

    Unresolved externs are tolerated: they become globals owned by the
    first unit (in the given order) that declares them.
    """
    global_defs: dict[str, tuple[str, VarDecl]] = {}
    extern_decls: dict[str, tuple[str, VarDecl]] = {}
    functions: dict[str, tuple[str, str | None, FuncDef]] = {}
    enums: dict[str, tuple[str, EnumDecl]] = {}
    enum_literal_types: dict[str, str] = {}

    for unit in units:
        for item in unit.items:
            if isinstance(item, EnumDecl):
                enums.setdefault(item.name, (unit.path, item))
                for member in item.members:
                    enum_literal_types.setdefault(member, item.name)
            elif isinstance(item, VarDecl):
                if item.extern:
                    extern_decls.setdefault(item.name, (unit.path, item))
                else:
                    global_defs.setdefault(item.name, (unit.path, item))
            elif isinstance(item, FuncDef):
                functions.setdefault(item.name, (unit.path, None, item))
            elif isinstance(item, ClassDecl):
                for member in item.members:
                    if isinstance(member, FuncDef):
                        functions.setdefault(member.name, (unit.path, item.name, member))

    for name, (unit_path, decl) in extern_decls.items():
        if name not in global_defs:
            global_defs[name] = (unit_path, decl)

    return LinkedProgram(list(units), global_defs, functions, enums, enum_literal_types)


# --------------------------------------------------------------------------
# Source rendering (round-trips through parse_mini_c)


def to_source(unit):
    out = []

    def line(depth, text):
        out.append("    " * depth + text)

    def type_str(t):
        return f"enum {t.name}" if t.is_enum else t.name

    def expr_str(e):
        if isinstance(e, Name):
            return e.name
        if isinstance(e, IntLit):
            return str(e.value)
        if isinstance(e, BoolLit):
            return "true" if e.value else "false"
        if isinstance(e, Unary):
            return f"{e.op}({expr_str(e.operand)})"
        if isinstance(e, Postfix):
            return f"({expr_str(e.operand)}){e.op}"
        if isinstance(e, Binary):
            return f"({expr_str(e.left)} {e.op} {expr_str(e.right)})"
        if isinstance(e, Call):
            return f"{e.callee.name}({', '.join(expr_str(a) for a in e.args)})"
        raise TypeError(f"not an expression: {e!r}")

    def var_decl_str(d):
        parts = []
        if d.extern:
            parts.append("extern")
        if d.const:
            parts.append("const")
        parts.append(type_str(d.type))
        parts.append(d.name)
        text = " ".join(parts)
        if d.init is not None:
            text += f" = {expr_str(d.init)}"
        return text + ";"

    def stmt(depth, s):
        if isinstance(s, Block):
            line(depth, "{")
            for inner in s.stmts:
                stmt(depth + 1, inner)
            line(depth, "}")
        elif isinstance(s, DeclStmt):
            line(depth, var_decl_str(s.decl))
        elif isinstance(s, AssignStmt):
            line(depth, f"{s.target.name} {s.op} {expr_str(s.value)};")
        elif isinstance(s, ExprStmt):
            line(depth, f"{expr_str(s.expr)};")
        elif isinstance(s, If):
            line(depth, f"if ({expr_str(s.cond)})")
            stmt_braced(depth, s.then)
            if s.els is not None:
                line(depth, "else")
                stmt_braced(depth, s.els)
        elif isinstance(s, While):
            line(depth, f"while ({expr_str(s.cond)})")
            stmt_braced(depth, s.body)
        elif isinstance(s, For):
            init = clause(s.init).rstrip(";") if s.init else ""
            cond = expr_str(s.cond) if s.cond is not None else ""
            step = clause(s.step).rstrip(";") if s.step else ""
            line(depth, f"for ({init}; {cond}; {step})")
            stmt_braced(depth, s.body)
        elif isinstance(s, Switch):
            line(depth, f"switch ({expr_str(s.subject)}) {{")
            for case in s.cases:
                if case.label is None:
                    line(depth + 1, "default:")
                else:
                    line(depth + 1, f"case {expr_str(case.label)}:")
                for inner in case.stmts:
                    stmt(depth + 2, inner)
            line(depth, "}")
        elif isinstance(s, Return):
            if s.value is None:
                line(depth, "return;")
            else:
                line(depth, f"return {expr_str(s.value)};")
        elif isinstance(s, Break):
            line(depth, "break;")
        elif isinstance(s, Continue):
            line(depth, "continue;")
        else:
            raise TypeError(f"not a statement: {s!r}")

    def clause(s):
        if isinstance(s, DeclStmt):
            return var_decl_str(s.decl)
        if isinstance(s, AssignStmt):
            return f"{s.target.name} {s.op} {expr_str(s.value)};"
        if isinstance(s, ExprStmt):
            return f"{expr_str(s.expr)};"
        raise TypeError(f"not a for-clause: {s!r}")

    def stmt_braced(depth, s):
        if isinstance(s, Block):
            stmt(depth, s)
        else:
            line(depth, "{")
            stmt(depth + 1, s)
            line(depth, "}")

    def func(depth, f):
        params = ", ".join(f"{type_str(p.type)} {p.name}" for p in f.params)
        line(depth, f"{type_str(f.return_type)} {f.name}({params})")
        stmt(depth, f.body)

    for item in unit.items:
        if isinstance(item, EnumDecl):
            line(0, f"enum {item.name} {{ {', '.join(item.members)} }};")
        elif isinstance(item, VarDecl):
            line(0, var_decl_str(item))
        elif isinstance(item, FuncDef):
            func(0, item)
        elif isinstance(item, ClassDecl):
            line(0, f"class {item.name} {{")
            for member in item.members:
                if isinstance(member, VarDecl):
                    line(1, var_decl_str(member))
                else:
                    func(1, member)
            line(0, "};")
    return "\n".join(out) + "\n"
