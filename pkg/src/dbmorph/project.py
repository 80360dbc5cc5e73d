"""Project files and canonical JSON serialization.

A project bundles a value domain, schema declarations, instance files,
mapping sources, and the edges of the mapping graph.  Instances and
mappings live in their own files, referenced by paths relative to the
project file.

Every serializer here is canonical: keys sorted, rows sorted, no
environment-dependent content, so two runs over the same inputs produce
byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .dsl import parse_mapping, pretty_literal, pretty_mapping, pretty_term
from .errors import SchemaError
from .flux import FluxKernel
from .interp import FunctionTable, InstanceMorphism, SatisfactionReport, TarskiInterpretation
from .logic import SOtgd, ValidationReport
from .model import (
    NULL,
    TRUTH,
    DomainValue,
    Instance,
    RelationSymbol,
    Row,
    Schema,
    sort_rows,
)
from .operads import (
    OperadArrow,
    OperadOperation,
    build_equal_var_set,
    compile_source,
    render_expression,
    render_implication,
    simple_var_positions,
)
from .saturation import PFunction, SaturatedMorphism

__all__ = [
    "value_to_json",
    "value_from_json",
    "rows_to_json",
    "instance_to_json",
    "load_instance",
    "load_instance_file",
    "load_interpretation_file",
    "MappingSource",
    "Project",
    "load_project",
    "compile_project_mapping",
    "canonical_json",
    "arrow_to_json",
    "morphism_to_json",
    "kernel_to_json",
    "saturation_to_json",
    "pfunction_to_json",
    "validation_to_json",
]


def value_to_json(value: DomainValue):
    if value is NULL:
        return None
    if value is TRUTH:
        raise SchemaError("the truth constant does not belong in stored rows")
    return value


def value_from_json(value, where: str = "value"):
    if value is None:
        return NULL
    if isinstance(value, bool):
        raise SchemaError(f"{where}: booleans are not domain values")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        raise SchemaError(f"{where}: floats are not domain values")
    if isinstance(value, str):
        return value
    raise SchemaError(f"{where}: {value!r} is not a domain value")


def rows_to_json(rows) -> list:
    return [[value_to_json(v) for v in row] for row in sort_rows(rows)]


def _row_from_json(row, where: str) -> Row:
    if not isinstance(row, list):
        raise SchemaError(f"{where}: each row must be a JSON array")
    return tuple(value_from_json(v, where) for v in row)


def instance_to_json(inst: Instance) -> dict:
    relations = {}
    for sym in inst.schema.ordinary_symbols():
        relations[sym.name] = {
            "columns": list(sym.columns),
            "rows": rows_to_json(inst.rows(sym.name)),
        }
    return {"schema": inst.schema.name, "relations": relations}


def load_instance(data: dict, schema: "Schema | None" = None, where: str = "instance") -> Instance:
    """Build an instance from parsed JSON; with a schema given, the file's
    relation names and columns must agree with it, and omitted relations
    load empty."""
    if not isinstance(data, dict) or "relations" not in data:
        raise SchemaError(f"{where}: expected an object with a 'relations' key")
    declared = data["relations"]
    if not isinstance(declared, dict):
        raise SchemaError(f"{where}: 'relations' must be an object")

    symbols = {}
    rows_by_name = {}
    for name, body in sorted(declared.items()):
        if not isinstance(body, dict) or "columns" not in body or "rows" not in body:
            raise SchemaError(f"{where}: relation {name} needs 'columns' and 'rows'")
        sym = RelationSymbol(name, tuple(body["columns"]))
        symbols[name] = sym
        rows_by_name[name] = frozenset(
            _row_from_json(r, f"{where}: {name}") for r in body["rows"]
        )

    if schema is None:
        schema = Schema(str(data.get("schema", "S")), symbols.values())
    else:
        if "schema" in data and data["schema"] != schema.name:
            raise SchemaError(
                f"{where}: file is for schema {data['schema']}, expected {schema.name}"
            )
        for name, sym in symbols.items():
            if sym != schema.symbol(name):
                raise SchemaError(
                    f"{where}: relation {name} disagrees with the schema's columns"
                )
    return Instance.build(schema, rows_by_name)


def load_instance_file(path, schema: "Schema | None" = None) -> Instance:
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    return load_instance(data, schema, where=str(path))


@dataclass(frozen=True)
class MappingSource:
    name: str
    source: str
    target: str
    text: str


@dataclass
class Project:
    domain: tuple = ()
    schemas: dict = field(default_factory=dict)
    instances: dict = field(default_factory=dict)
    mappings: dict = field(default_factory=dict)
    graph: tuple = ()

    def schema(self, name: str) -> Schema:
        if name not in self.schemas:
            raise SchemaError(f"project declares no schema {name}")
        return self.schemas[name]

    def instance(self, name: str) -> Instance:
        if name not in self.instances:
            raise SchemaError(f"project declares no instance {name}")
        return self.instances[name]

    def mapping(self, name: str) -> MappingSource:
        if name not in self.mappings:
            raise SchemaError(f"project declares no mapping {name}")
        return self.mappings[name]


def _schema_constraints(text: str, where: str):
    parsed = parse_mapping(text)
    if isinstance(parsed, SOtgd):
        raise SchemaError(f"{where}: constraints must be plain dependencies")
    return tuple(parsed)


def load_project(path) -> Project:
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    base = path.parent

    domain = tuple(value_from_json(v, "project domain") for v in data.get("domain", []))

    schemas = {}
    for name, body in sorted(data.get("schemas", {}).items()):
        symbols = [
            RelationSymbol(rel, tuple(cols))
            for rel, cols in sorted(body.get("relations", {}).items())
        ]
        constraints = ()
        if "constraints" in body:
            constraints = _schema_constraints(body["constraints"], f"schema {name}")
        schemas[name] = Schema(name, symbols, constraints)

    project = Project(domain=domain, schemas=schemas)

    for name, body in sorted(data.get("instances", {}).items()):
        schema = project.schema(body["schema"])
        project.instances[name] = load_instance_file(base / body["file"], schema)

    for name, body in sorted(data.get("mappings", {}).items()):
        src = project.schema(body["source"])
        tgt = project.schema(body["target"])
        text = (base / body["file"]).read_text(encoding="utf-8")
        project.mappings[name] = MappingSource(name, src.name, tgt.name, text)

    edges = []
    for edge in data.get("graph", []):
        src, tgt, mapping = edge
        project.schema(src)
        project.schema(tgt)
        ms = project.mapping(mapping)
        if (ms.source, ms.target) != (src, tgt):
            raise SchemaError(
                f"graph edge {edge!r} disagrees with mapping {mapping}'s schemas"
            )
        edges.append((src, tgt, mapping))
    project.graph = tuple(edges)
    return project


def compile_project_mapping(project: Project, name: str) -> OperadArrow:
    ms = project.mapping(name)
    return compile_source(
        ms.text, project.schema(ms.source), project.schema(ms.target), name=name
    )


def load_interpretation_file(path, project: Project) -> TarskiInterpretation:
    """An interpretation file names its instances and lists skolem tables:

        { "source": "a", "target": "b", "extras": ["c"],
          "domain": [0, 1],
          "skolem": { "f1": { "entries": [[[132], "art"]], "default": "x" } } }

    Characteristic functions and the hash built-in never appear here.
    """
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    if "source" not in data or "target" not in data:
        raise SchemaError(f"{path}: interpretation needs 'source' and 'target'")
    source = project.instance(data["source"])
    target = project.instance(data["target"])
    extras = tuple(project.instance(n) for n in data.get("extras", []))

    tables = {}
    for fname, body in sorted(data.get("skolem", {}).items()):
        entries = {}
        for pair in body.get("entries", []):
            if not isinstance(pair, list) or len(pair) != 2:
                raise SchemaError(f"{path}: {fname}: entries are [args, value] pairs")
            args, value = pair
            entries[_row_from_json(args, f"{path}: {fname}")] = value_from_json(
                value, f"{path}: {fname}"
            )
        default = None
        if "default" in body:
            default = value_from_json(body["default"], f"{path}: {fname} default")
        tables[fname] = FunctionTable(fname, entries, default)

    domain = None
    if "domain" in data:
        domain = frozenset(
            value_from_json(v, f"{path}: domain") for v in data["domain"]
        )
    return TarskiInterpretation(source, target, tables, extras, domain)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _equal_set_to_json(op: OperadOperation) -> list:
    groups = []
    for group in build_equal_var_set(op):
        groups.append(sorted([i, j] for (i, j) in group))
    return sorted(groups)


def _op_to_json(op: OperadOperation) -> dict:
    return {
        "name": op.name,
        "rq": op.rq_name,
        "target": op.target,
        "targetColumns": list(op.target_columns),
        "expression": render_expression(op),
        "logic": render_implication(op),
        "places": [
            {
                "symbol": p.symbol,
                "variables": list(p.variables),
                "negated": p.negated,
                "char": p.char,
            }
            for p in op.places
        ],
        "guards": [pretty_literal(g) for g in op.guards],
        "head": [pretty_term(t) for t in op.target_terms],
        "variableOrder": list(op.variable_order),
        "S": _equal_set_to_json(op),
        "Z": sorted(simple_var_positions(op)),
    }


def arrow_to_json(arrow: OperadArrow) -> dict:
    return {
        "name": arrow.name,
        "source": arrow.source_schema.name,
        "target": arrow.target_schema.name,
        "identity": arrow.identity.name,
        "operations": [_op_to_json(op) for op in arrow.operations],
    }


def morphism_to_json(m: InstanceMorphism, report: SatisfactionReport) -> dict:
    return {
        "arrow": m.arrow.name,
        "satisfied": report.satisfied,
        "violations": [
            {"operation": op, "row": [value_to_json(v) for v in row]}
            for op, row in report.violations
        ],
        "components": [
            {
                "operation": c.op.name,
                "rq": c.op.rq_name,
                "target": c.op.target,
                "image": rows_to_json(c.image()),
            }
            for c in m.components
        ],
    }


def kernel_to_json(kernel: FluxKernel) -> dict:
    return {"members": [rows_to_json(m) for m in kernel.sorted_members()]}


def _args_to_json(args: tuple) -> list:
    return [[value_to_json(v) for v in row] for row in args]


def saturation_to_json(sat: SaturatedMorphism) -> dict:
    return {
        "arrow": sat.arrow.name,
        "extras": [
            {
                "op": e.op_name,
                "opIndex": e.op_index,
                "args": _args_to_json(e.trigger),
                "b": [value_to_json(v) for v in e.output],
                "perturbation": [
                    {
                        "function": fname,
                        "args": [value_to_json(v) for v in fargs],
                        "value": value_to_json(val),
                    }
                    for (fname, fargs), val in e.perturbation
                ],
            }
            for e in sat.extras
        ],
        "skipped": [
            {
                "op": s.op_name,
                "opIndex": s.op_index,
                "args": _args_to_json(s.trigger),
                "b": [value_to_json(v) for v in s.candidate],
                "reason": s.reason,
            }
            for s in sat.skipped
        ],
        "counts": {"extras": len(sat.extras), "skipped": len(sat.skipped)},
    }


def pfunction_to_json(pf: PFunction) -> dict:
    return {
        "name": pf.name,
        "codomain": pf.codomain,
        "domain": [
            {"symbol": s, "negated": neg, "char": char} for s, neg, char in pf.domain
        ],
        "graph": [
            {"args": _args_to_json(args), "rows": rows_to_json(rows)}
            for args, rows in pf.graph
        ],
    }


def validation_to_json(report: ValidationReport) -> dict:
    entries = []
    for v in report.violations:
        entries.append(
            {
                "constraint": pretty_mapping([v.constraint]),
                "witness": {name: value_to_json(val) for name, val in v.witness},
            }
        )
    entries.sort(key=lambda e: (e["constraint"], sorted(e["witness"].items(), key=str)))
    return {"valid": report.ok, "violations": entries}
