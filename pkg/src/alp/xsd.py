"""Schema-driven XML validation for the subset of XSD the vendored schemas use.

Covers: global/local elements, complex types with sequence/choice content
(nested, with occurrence bounds), simpleContent extensions, complexContent
restriction/extension, mixed content, attributes (local, ref, required,
qualified form), simple type restrictions (enumeration, pattern), unions,
substitution groups, xs:any wildcards (strict/lax, ##other) and xsi:type
overrides. That is exactly what OAI-PMH 2.0 + oai_dc + the qualifier
extension need; anything else in a schema file raises XsdError loudly
rather than passing unchecked.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union
from xml.etree import ElementTree as ET

XSD_NS = "http://www.w3.org/2001/XMLSchema"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"

_XS = f"{{{XSD_NS}}}"

QName = tuple[str, str]  # (namespace uri, local name)

ANY_TYPE: QName = (XSD_NS, "anyType")


class XsdError(Exception):
    """The schema itself is broken or uses a construct outside the subset."""


class ValidationError(Exception):
    """The instance document violates the schema; ``path`` locates the spot."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


# --- namespace-aware parsing ---------------------------------------------------


def parse_with_nsmap(data: bytes) -> tuple[ET.Element, dict[ET.Element, dict[str, str]]]:
    """Parse XML keeping, per element, the prefix map in scope there.

    ElementTree resolves prefixes away at parse time, but xsi:type values
    and QName attributes in schema documents need them back.
    """
    nsmaps: dict[ET.Element, dict[str, str]] = {}
    stack: list[dict[str, str]] = [{}]
    pending: dict[str, str] = {}
    root: ET.Element | None = None
    try:
        for event, payload in ET.iterparse(io.BytesIO(data), events=("start-ns", "start", "end")):
            if event == "start-ns":
                prefix, uri = payload
                pending[prefix] = uri
            elif event == "start":
                scope = {**stack[-1], **pending}
                pending = {}
                stack.append(scope)
                nsmaps[payload] = scope
                if root is None:
                    root = payload
            else:
                stack.pop()
    except ET.ParseError as exc:
        raise ValidationError(f"document is not well-formed XML: {exc}") from exc
    if root is None:
        raise ValidationError("document has no root element")
    return root, nsmaps


def _split_tag(tag: str) -> QName:
    if tag.startswith("{"):
        uri, _, local = tag[1:].partition("}")
        return (uri, local)
    return ("", tag)


def _resolve_qname(raw: str, nsmap: dict[str, str]) -> QName:
    raw = raw.strip()
    if ":" in raw:
        prefix, local = raw.split(":", 1)
        if prefix not in nsmap:
            raise XsdError(f"undeclared namespace prefix {prefix!r} in {raw!r}")
        return (nsmap[prefix], local)
    return (nsmap.get("", ""), raw)


# --- schema model --------------------------------------------------------------


@dataclass
class SimpleTypeDef:
    name: QName | None
    base: QName | None = None  # restriction base
    enumerations: tuple[str, ...] = ()
    patterns: tuple[str, ...] = ()  # alternatives within one restriction step
    union_members: tuple[QName, ...] = ()
    builtin: str | None = None


@dataclass
class AttrDecl:
    name: QName
    type_ref: QName | None
    inline_type: Optional[SimpleTypeDef]
    required: bool = False
    is_ref: bool = False


@dataclass
class ElementParticle:
    ref: QName  # element qname (local name for inline decls too)
    decl: Optional["ElementDecl"]  # inline/local declaration if not a ref
    min_occurs: int
    max_occurs: int | None
    is_ref: bool


@dataclass
class GroupParticle:
    kind: str  # "sequence" | "choice"
    children: list
    min_occurs: int
    max_occurs: int | None


@dataclass
class AnyParticle:
    namespace: str  # "##any" | "##other"
    process: str  # "strict" | "lax" | "skip"
    owner_ns: str
    min_occurs: int
    max_occurs: int | None


Particle = Union[ElementParticle, GroupParticle, AnyParticle]


@dataclass
class ComplexTypeDef:
    name: QName | None
    mixed: bool = False
    particle: Particle | None = None
    attributes: dict[QName, AttrDecl] = field(default_factory=dict)
    base: QName | None = None
    simple_content_base: QName | None = None


TypeDef = Union[SimpleTypeDef, ComplexTypeDef]


@dataclass
class ElementDecl:
    name: QName
    type_ref: QName | None
    inline_type: TypeDef | None
    substitution_head: QName | None = None
    abstract: bool = False


_BUILTIN_PATTERNS = {
    "dateTime": r"-?\d{4,}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:\d{2})?",
    "date": r"-?\d{4,}-\d{2}-\d{2}(Z|[+-]\d{2}:\d{2})?",
    "language": r"[a-zA-Z]{1,8}(-[a-zA-Z0-9]{1,8})*",
    "NCName": r"[^\s:]+",
    "ID": r"[^\s:]+",
    "positiveInteger": r"\+?0*[1-9]\d*",
    "nonNegativeInteger": r"\+?\d+",
    "integer": r"[+-]?\d+",
    "decimal": r"[+-]?(\d+(\.\d*)?|\.\d+)",
    "boolean": r"(true|false|1|0)",
}
_BUILTIN_ANY = {"string", "normalizedString", "token", "anyURI", "anySimpleType", "anyType"}


class SchemaSet:
    """All schema documents of one validation universe, cross-resolved."""

    def __init__(self):
        self.elements: dict[QName, ElementDecl] = {}
        self.types: dict[QName, TypeDef] = {}
        self.attributes: dict[QName, AttrDecl] = {}

    # -- loading

    @classmethod
    def load_files(cls, paths: list[Path]) -> "SchemaSet":
        schema_set = cls()
        for path in paths:
            schema_set._load_document(Path(path))
        return schema_set

    @classmethod
    def load_dir(cls, directory: str | Path) -> "SchemaSet":
        paths = sorted(Path(directory).glob("*.xsd"))
        if not paths:
            raise XsdError(f"no .xsd files in {directory}")
        return cls.load_files(paths)

    def _load_document(self, path: Path) -> None:
        root, nsmaps = parse_with_nsmap(path.read_bytes())
        if root.tag != f"{_XS}schema":
            raise XsdError(f"{path.name}: root element is not xs:schema")
        target = root.get("targetNamespace", "")
        attr_qualified = root.get("attributeFormDefault", "unqualified") == "qualified"
        ctx = _ParseContext(target, attr_qualified, nsmaps)
        for child in root:
            tag = child.tag
            if tag in (f"{_XS}annotation", f"{_XS}import", f"{_XS}include"):
                continue  # all participating files are loaded explicitly
            if tag == f"{_XS}element":
                decl = ctx.parse_global_element(child)
                self.elements[decl.name] = decl
            elif tag == f"{_XS}complexType":
                typedef = ctx.parse_complex_type(child)
                self.types[typedef.name] = typedef
            elif tag == f"{_XS}simpleType":
                typedef = ctx.parse_simple_type(child)
                self.types[typedef.name] = typedef
            elif tag == f"{_XS}attribute":
                decl = ctx.parse_attribute(child, top_level=True)
                self.attributes[decl.name] = decl
            else:
                raise XsdError(f"{path.name}: unsupported top-level construct {tag}")

    # -- resolution

    def resolve_type(self, qname: QName) -> TypeDef:
        if qname[0] == XSD_NS:
            return self._builtin(qname[1])
        try:
            return self.types[qname]
        except KeyError:
            raise XsdError(f"reference to undefined type {qname}") from None

    def _builtin(self, name: str) -> SimpleTypeDef:
        if name == "anyType":
            return SimpleTypeDef(name=(XSD_NS, name), builtin="anyType")
        if name in _BUILTIN_ANY or name in _BUILTIN_PATTERNS:
            return SimpleTypeDef(name=(XSD_NS, name), builtin=name)
        raise XsdError(f"unsupported XSD builtin type xs:{name}")

    def element_type(self, decl: ElementDecl) -> TypeDef:
        if decl.type_ref is not None:
            return self.resolve_type(decl.type_ref)
        if decl.inline_type is not None:
            return decl.inline_type
        if decl.substitution_head is not None:
            head = self.elements.get(decl.substitution_head)
            if head is None:
                raise XsdError(f"substitution head {decl.substitution_head} is undefined")
            return self.element_type(head)
        return self.resolve_type(ANY_TYPE)

    def substitutes(self, member: QName, head: QName) -> bool:
        seen: set[QName] = set()
        current = self.elements.get(member)
        while current is not None and current.substitution_head is not None:
            if current.substitution_head == head:
                return True
            if current.name in seen:
                return False
            seen.add(current.name)
            current = self.elements.get(current.substitution_head)
        return False

    def type_qname(self, typedef: TypeDef) -> QName | None:
        return typedef.name

    def derives_from(self, candidate: TypeDef, ancestor: TypeDef) -> bool:
        """True when candidate == ancestor or reaches it through base links."""
        if ancestor.name == ANY_TYPE:
            return True
        current: TypeDef | None = candidate
        seen: set[QName] = set()
        while current is not None:
            if current is ancestor or (current.name is not None and current.name == ancestor.name):
                return True
            if isinstance(current, ComplexTypeDef):
                base = current.base or current.simple_content_base
            else:
                base = current.base
            if base is None or base in seen:
                return False
            seen.add(base)
            if base[0] == XSD_NS:
                return ancestor.name is not None and ancestor.name == base
            current = self.types.get(base)
        return False

    # -- validation entry points

    def validate(self, document: bytes | str | ET.Element) -> None:
        if isinstance(document, ET.Element):
            data = ET.tostring(document, encoding="utf-8")
        elif isinstance(document, str):
            data = document.encode("utf-8")
        else:
            data = document
        root, nsmaps = parse_with_nsmap(data)
        decl = self.elements.get(_split_tag(root.tag))
        if decl is None:
            raise ValidationError(f"no global element declaration for {root.tag}", path="/")
        _Validator(self, nsmaps).validate_element(root, decl, f"/{_split_tag(root.tag)[1]}")


@dataclass
class _ParseContext:
    target: str
    attr_qualified: bool
    nsmaps: dict[ET.Element, dict[str, str]]

    def qname(self, raw: str, element: ET.Element) -> QName:
        return _resolve_qname(raw, self.nsmaps[element])

    def _occurs(self, element: ET.Element) -> tuple[int, int | None]:
        min_occurs = int(element.get("minOccurs", "1"))
        raw_max = element.get("maxOccurs", "1")
        max_occurs = None if raw_max == "unbounded" else int(raw_max)
        return min_occurs, max_occurs

    def _content_children(self, element: ET.Element) -> list[ET.Element]:
        return [c for c in element if c.tag != f"{_XS}annotation"]

    def parse_global_element(self, element: ET.Element) -> ElementDecl:
        name = element.get("name")
        if not name:
            raise XsdError("global xs:element needs a name")
        type_ref = element.get("type")
        inline = self._parse_inline_type(element)
        subst = element.get("substitutionGroup")
        return ElementDecl(
            name=(self.target, name),
            type_ref=self.qname(type_ref, element) if type_ref else None,
            inline_type=inline,
            substitution_head=self.qname(subst, element) if subst else None,
            abstract=element.get("abstract") == "true",
        )

    def _parse_inline_type(self, element: ET.Element) -> TypeDef | None:
        for child in self._content_children(element):
            if child.tag == f"{_XS}complexType":
                return self.parse_complex_type(child, anonymous=True)
            if child.tag == f"{_XS}simpleType":
                return self.parse_simple_type(child, anonymous=True)
        return None

    def parse_simple_type(self, element: ET.Element, anonymous: bool = False) -> SimpleTypeDef:
        name = None if anonymous else (self.target, element.get("name", ""))
        for child in self._content_children(element):
            if child.tag == f"{_XS}restriction":
                base = child.get("base")
                if not base:
                    raise XsdError("xs:restriction needs a base")
                enums = tuple(
                    e.get("value", "") for e in child.findall(f"{_XS}enumeration")
                )
                patterns = tuple(p.get("value", "") for p in child.findall(f"{_XS}pattern"))
                return SimpleTypeDef(
                    name=name, base=self.qname(base, child), enumerations=enums, patterns=patterns
                )
            if child.tag == f"{_XS}union":
                members = child.get("memberTypes", "")
                if not members:
                    raise XsdError("xs:union without memberTypes is unsupported")
                return SimpleTypeDef(
                    name=name,
                    union_members=tuple(self.qname(m, child) for m in members.split()),
                )
        raise XsdError("xs:simpleType needs a restriction or union")

    def parse_complex_type(self, element: ET.Element, anonymous: bool = False) -> ComplexTypeDef:
        typedef = ComplexTypeDef(
            name=None if anonymous else (self.target, element.get("name", "")),
            mixed=element.get("mixed") == "true",
        )
        for child in self._content_children(element):
            tag = child.tag
            if tag in (f"{_XS}sequence", f"{_XS}choice"):
                typedef.particle = self.parse_group(child)
                typedef.base = ANY_TYPE
            elif tag == f"{_XS}attribute":
                decl = self.parse_attribute(child)
                typedef.attributes[decl.name] = decl
            elif tag == f"{_XS}simpleContent":
                self._parse_simple_content(child, typedef)
            elif tag == f"{_XS}complexContent":
                if child.get("mixed") == "true":
                    typedef.mixed = True
                self._parse_complex_content(child, typedef)
            else:
                raise XsdError(f"unsupported construct {tag} in complexType")
        return typedef

    def _parse_simple_content(self, element: ET.Element, typedef: ComplexTypeDef) -> None:
        for child in self._content_children(element):
            if child.tag != f"{_XS}extension":
                raise XsdError("only xs:extension is supported inside simpleContent")
            base = child.get("base")
            if not base:
                raise XsdError("simpleContent extension needs a base")
            typedef.simple_content_base = self.qname(base, child)
            for sub in self._content_children(child):
                if sub.tag == f"{_XS}attribute":
                    decl = self.parse_attribute(sub)
                    typedef.attributes[decl.name] = decl
                else:
                    raise XsdError(f"unsupported construct {sub.tag} in simpleContent extension")

    def _parse_complex_content(self, element: ET.Element, typedef: ComplexTypeDef) -> None:
        for child in self._content_children(element):
            if child.tag not in (f"{_XS}extension", f"{_XS}restriction"):
                raise XsdError("complexContent needs extension or restriction")
            base = child.get("base")
            if not base:
                raise XsdError("complexContent derivation needs a base")
            typedef.base = self.qname(base, child)
            for sub in self._content_children(child):
                if sub.tag in (f"{_XS}sequence", f"{_XS}choice"):
                    typedef.particle = self.parse_group(sub)
                elif sub.tag == f"{_XS}attribute":
                    decl = self.parse_attribute(sub)
                    typedef.attributes[decl.name] = decl
                else:
                    raise XsdError(f"unsupported construct {sub.tag} in complexContent")

    def parse_group(self, element: ET.Element) -> GroupParticle:
        kind = "sequence" if element.tag == f"{_XS}sequence" else "choice"
        min_occurs, max_occurs = self._occurs(element)
        children: list[Particle] = []
        for child in self._content_children(element):
            tag = child.tag
            if tag == f"{_XS}element":
                children.append(self.parse_local_element(child))
            elif tag in (f"{_XS}sequence", f"{_XS}choice"):
                children.append(self.parse_group(child))
            elif tag == f"{_XS}any":
                amin, amax = self._occurs(child)
                children.append(
                    AnyParticle(
                        namespace=child.get("namespace", "##any"),
                        process=child.get("processContents", "strict"),
                        owner_ns=self.target,
                        min_occurs=amin,
                        max_occurs=amax,
                    )
                )
            else:
                raise XsdError(f"unsupported particle {tag}")
        return GroupParticle(kind=kind, children=children, min_occurs=min_occurs, max_occurs=max_occurs)

    def parse_local_element(self, element: ET.Element) -> ElementParticle:
        min_occurs, max_occurs = self._occurs(element)
        ref = element.get("ref")
        if ref:
            return ElementParticle(
                ref=self.qname(ref, element),
                decl=None,
                min_occurs=min_occurs,
                max_occurs=max_occurs,
                is_ref=True,
            )
        name = element.get("name")
        if not name:
            raise XsdError("local xs:element needs a name or ref")
        type_ref = element.get("type")
        decl = ElementDecl(
            name=(self.target, name),  # elementFormDefault=qualified throughout
            type_ref=self.qname(type_ref, element) if type_ref else None,
            inline_type=self._parse_inline_type(element),
        )
        return ElementParticle(
            ref=decl.name, decl=decl, min_occurs=min_occurs, max_occurs=max_occurs, is_ref=False
        )

    def parse_attribute(self, element: ET.Element, top_level: bool = False) -> AttrDecl:
        required = element.get("use") == "required"
        ref = element.get("ref")
        if ref:
            return AttrDecl(
                name=self.qname(ref, element), type_ref=None, inline_type=None,
                required=required, is_ref=True,
            )
        name = element.get("name")
        if not name:
            raise XsdError("xs:attribute needs a name or ref")
        qualified = top_level or self.attr_qualified or element.get("form") == "qualified"
        type_ref = element.get("type")
        inline = None
        for child in self._content_children(element):
            if child.tag == f"{_XS}simpleType":
                inline = self.parse_simple_type(child, anonymous=True)
        return AttrDecl(
            name=(self.target if qualified else "", name),
            type_ref=self.qname(type_ref, element) if type_ref else None,
            inline_type=inline,
            required=required,
        )


# --- instance validation --------------------------------------------------------


class _Validator:
    def __init__(self, schema_set: SchemaSet, nsmaps: dict[ET.Element, dict[str, str]]):
        self.schemas = schema_set
        self.nsmaps = nsmaps

    # -- simple values

    def check_simple(self, typedef: SimpleTypeDef, value: str, path: str) -> None:
        collapsed = " ".join(value.split())
        if typedef.builtin is not None:
            if typedef.builtin in _BUILTIN_ANY:
                return
            pattern = _BUILTIN_PATTERNS[typedef.builtin]
            if not re.fullmatch(pattern, collapsed):
                raise ValidationError(
                    f"value {collapsed!r} is not a valid xs:{typedef.builtin}", path
                )
            return
        if typedef.union_members:
            for member in typedef.union_members:
                member_def = self.schemas.resolve_type(member)
                try:
                    self.check_simple(self._as_simple(member_def, path), value, path)
                    return
                except ValidationError:
                    continue
            raise ValidationError(f"value {collapsed!r} matches no union member", path)
        if typedef.base is not None:
            base_def = self.schemas.resolve_type(typedef.base)
            self.check_simple(self._as_simple(base_def, path), value, path)
        if typedef.enumerations and collapsed not in typedef.enumerations:
            raise ValidationError(
                f"value {collapsed!r} not in enumeration {list(typedef.enumerations)}", path
            )
        if typedef.patterns and not any(
            re.fullmatch(p, collapsed) for p in typedef.patterns
        ):
            raise ValidationError(f"value {collapsed!r} matches no pattern of the type", path)

    def _as_simple(self, typedef: TypeDef, path: str) -> SimpleTypeDef:
        if isinstance(typedef, SimpleTypeDef):
            return typedef
        raise ValidationError("complex type used where a simple value is required", path)

    # -- attributes

    def _effective_attributes(self, typedef: ComplexTypeDef) -> dict[QName, AttrDecl]:
        chain: list[ComplexTypeDef] = []
        current: TypeDef | None = typedef
        seen: set[int] = set()
        while isinstance(current, ComplexTypeDef) and id(current) not in seen:
            seen.add(id(current))
            chain.append(current)
            base = current.base or current.simple_content_base
            if base is None or base[0] == XSD_NS:
                break
            current = self.schemas.types.get(base)
        merged: dict[QName, AttrDecl] = {}
        for typedef_in_chain in reversed(chain):
            merged.update(typedef_in_chain.attributes)
        return merged

    def _attr_decl_type(self, decl: AttrDecl) -> SimpleTypeDef:
        if decl.is_ref:
            target = self.schemas.attributes.get(decl.name)
            if target is None:
                raise XsdError(f"reference to undeclared attribute {decl.name}")
            return self._attr_decl_type(target)
        if decl.type_ref is not None:
            resolved = self.schemas.resolve_type(decl.type_ref)
            if not isinstance(resolved, SimpleTypeDef):
                raise XsdError(f"attribute {decl.name} has a complex type")
            return resolved
        if decl.inline_type is not None:
            return decl.inline_type
        return SimpleTypeDef(name=None, builtin="string")

    def check_attributes(self, element: ET.Element, typedef: ComplexTypeDef, path: str) -> None:
        allowed = self._effective_attributes(typedef)
        present: set[QName] = set()
        for raw_name, raw_value in element.attrib.items():
            qname = _split_tag(raw_name)
            if qname[0] == XSI_NS:
                continue  # xsi:type / xsi:schemaLocation ride on any element
            decl = allowed.get(qname)
            if decl is None:
                raise ValidationError(f"attribute {raw_name!r} is not allowed here", path)
            present.add(qname)
            self.check_simple(self._attr_decl_type(decl), raw_value, f"{path}/@{qname[1]}")
        for qname, decl in allowed.items():
            if decl.required and qname not in present:
                raise ValidationError(f"required attribute {qname[1]!r} is missing", path)

    # -- structure

    def _element_matches(self, particle: ElementParticle, tag_qname: QName) -> bool:
        if particle.ref == tag_qname:
            decl = self.schemas.elements.get(tag_qname) if particle.is_ref else particle.decl
            return not (decl is not None and decl.abstract)
        if particle.is_ref:
            return self.schemas.substitutes(tag_qname, particle.ref)
        return False

    def _wildcard_admits(self, particle: AnyParticle, ns: str) -> bool:
        if particle.namespace == "##any":
            return True
        if particle.namespace == "##other":
            return bool(ns) and ns != particle.owner_ns
        return ns in particle.namespace.split()

    def _match_once(self, particle: Particle, children: list[ET.Element], start: int):
        """Yield (next_index, [(child_index, binding)]) for ONE occurrence."""
        if isinstance(particle, ElementParticle):
            if start < len(children):
                tag_qname = _split_tag(children[start].tag)
                if self._element_matches(particle, tag_qname):
                    if particle.is_ref:
                        decl = self.schemas.elements[tag_qname]
                    else:
                        decl = particle.decl
                    yield start + 1, [(start, decl)]
            return
        if isinstance(particle, AnyParticle):
            if start < len(children) and self._wildcard_admits(
                particle, _split_tag(children[start].tag)[0]
            ):
                yield start + 1, [(start, particle)]
            return
        if particle.kind == "sequence":
            states = [(start, [])]
            for child_particle in particle.children:
                next_states = []
                seen_positions = set()
                for pos, bindings in states:
                    for end, more in self._match_particle(child_particle, children, pos):
                        if end not in seen_positions:
                            seen_positions.add(end)
                            next_states.append((end, bindings + more))
                states = next_states
                if not states:
                    return
            yield from states
            return
        # choice: one branch matches
        for child_particle in particle.children:
            yield from self._match_particle(child_particle, children, start)

    def _match_particle(self, particle: Particle, children: list[ET.Element], start: int):
        """Yield (next_index, bindings) honoring occurrence bounds, longest first."""
        min_occurs = particle.min_occurs
        max_occurs = particle.max_occurs
        results: list[tuple[int, list]] = []
        seen_positions: set[int] = set()

        def recurse(pos: int, count: int, bindings: list) -> None:
            if max_occurs is None or count < max_occurs:
                for end, more in self._match_once(particle, children, pos):
                    if end == pos and count >= 1:
                        continue  # an empty repetition makes no progress
                    recurse(end, count + 1, bindings + more)
            if count >= min_occurs and pos not in seen_positions:
                seen_positions.add(pos)
                results.append((pos, bindings))

        recurse(start, 0, [])
        return results

    # -- elements

    def validate_element(self, element: ET.Element, decl: ElementDecl, path: str) -> None:
        typedef = self.schemas.element_type(decl)
        declared_name = self.schemas.type_qname(typedef)

        xsi_type = element.get(f"{{{XSI_NS}}}type")
        if xsi_type is not None:
            override_qname = _resolve_qname(xsi_type, self.nsmaps.get(element, {}))
            override = self.schemas.resolve_type(override_qname)
            if declared_name != ANY_TYPE and not self.schemas.derives_from(override, typedef):
                raise ValidationError(
                    f"xsi:type {xsi_type!r} does not derive from the declared type", path
                )
            typedef = override

        if isinstance(typedef, SimpleTypeDef):
            if typedef.builtin == "anyType":
                return  # unconstrained
            if len(element):
                raise ValidationError("element children are not allowed for a simple type", path)
            self.check_simple(typedef, element.text or "", path)
            return

        self.check_attributes(element, typedef, path)

        if typedef.simple_content_base is not None:
            if len(element):
                raise ValidationError("element children are not allowed in simpleContent", path)
            base_def = self.schemas.resolve_type(typedef.simple_content_base)
            self.check_simple(self._as_simple(base_def, path), element.text or "", path)
            return

        mixed = self._mixed(typedef)
        if not mixed:
            stray = (element.text or "").strip() or any(
                (child.tail or "").strip() for child in element
            )
            if stray:
                raise ValidationError("text content is not allowed here", path)

        children = list(element)
        particle = self._effective_particle(typedef)
        if particle is None:
            if children:
                raise ValidationError(
                    f"element {_split_tag(children[0].tag)[1]!r} is not allowed here", path
                )
            return

        full = [
            bindings
            for end, bindings in self._match_particle(particle, children, 0)
            if end == len(children)
        ]
        if not full:
            self._content_error(particle, children, path)
        self._validate_bindings(full[0], children, path)

    def _mixed(self, typedef: ComplexTypeDef) -> bool:
        if typedef.mixed:
            return True
        base = typedef.base
        seen: set[QName] = set()
        while base is not None and base not in seen and base[0] != XSD_NS:
            seen.add(base)
            parent = self.schemas.types.get(base)
            if not isinstance(parent, ComplexTypeDef):
                break
            if parent.mixed:
                return True
            base = parent.base
        return False

    def _effective_particle(self, typedef: ComplexTypeDef) -> Particle | None:
        if typedef.particle is not None:
            return typedef.particle
        # extension with no own particle inherits the base content model
        base = typedef.base
        if base is not None and base[0] != XSD_NS:
            parent = self.schemas.types.get(base)
            if isinstance(parent, ComplexTypeDef):
                return self._effective_particle(parent)
        return None

    def _content_error(self, particle: Particle, children: list[ET.Element], path: str):
        best = 0
        for end, _ in self._match_particle(particle, children, 0):
            best = max(best, end)
        if best < len(children):
            culprit = _split_tag(children[best].tag)
            raise ValidationError(
                f"element {{{culprit[0]}}}{culprit[1]} is not allowed at position {best}", path
            )
        raise ValidationError("content ends before all required elements are present", path)

    def _validate_bindings(self, bindings: list, children: list[ET.Element], path: str) -> None:
        counters: dict[str, int] = {}
        for index, binding in bindings:
            child = children[index]
            local = _split_tag(child.tag)[1]
            counters[local] = counters.get(local, 0) + 1
            child_path = f"{path}/{local}[{counters[local]}]"
            if isinstance(binding, AnyParticle):
                if binding.process == "skip":
                    continue
                decl = self.schemas.elements.get(_split_tag(child.tag))
                if decl is None:
                    if binding.process == "strict":
                        raise ValidationError(
                            f"strict wildcard: no declaration for {child.tag}", child_path
                        )
                    continue  # lax: undeclared content passes
                self.validate_element(child, decl, child_path)
            else:
                self.validate_element(child, binding, child_path)


_default_schema_set: SchemaSet | None = None


def default_schema_set() -> SchemaSet:
    """The vendored OAI-PMH 2.0 + oai_dc + qualifier-extension universe."""
    global _default_schema_set
    if _default_schema_set is None:
        _default_schema_set = SchemaSet.load_dir(Path(__file__).parent / "schemas")
    return _default_schema_set


def validate_oai_response(data: bytes | str | ET.Element) -> None:
    default_schema_set().validate(data)
