"""Harvesting protocol endpoint: verbs, pagination, errors, schema validity.

Every response asserted on here is also run through the vendored schema
validator, error envelopes included.
"""

import xml.etree.ElementTree as ET
from collections import Counter

import pytest

from alp.metadata import DC_NS, OAI_DC_NS, from_oai_dc_xml
from alp.oai import OAI_NS, OaiEndpoint, ResumptionToken, TokenError
from alp.xsd import validate_oai_response

NS = {"oai": OAI_NS, "dc": DC_NS, "oai_dc": OAI_DC_NS}

CLOCK = lambda: "2026-08-01T12:00:00Z"  # noqa: E731 (deterministic responses)


@pytest.fixture(scope="module")
def endpoint(demo_snapshot):
    return OaiEndpoint(demo_snapshot, clock=CLOCK)


def call(endpoint, **params):
    """Issue a request, validate the response against the schemas, parse it."""
    data = endpoint.handle(params)
    validate_oai_response(data)
    return ET.fromstring(data)


def error_code(root):
    errors = root.findall("oai:error", NS)
    assert errors, "expected an error response"
    return errors[0].get("code")


# --- Identify / ListMetadataFormats / ListSets -----------------------------------


def test_identify_fields(endpoint, demo_snapshot):
    root = call(endpoint, verb="Identify")
    identify = root.find("oai:Identify", NS)
    get = lambda tag: identify.findtext(f"oai:{tag}", namespaces=NS)  # noqa: E731
    assert get("repositoryName") == "Artist Libraries Catalog"
    assert get("protocolVersion") == "2.0"
    assert get("adminEmail") == "curator@example.org"
    assert get("deletedRecord") == "no"
    assert get("granularity") == "YYYY-MM-DDThh:mm:ssZ"
    earliest = min(r.created_at for r in demo_snapshot.records)
    assert get("earliestDatestamp") == earliest
    assert root.findtext("oai:responseDate", namespaces=NS) == CLOCK()


def test_identify_rejects_extra_arguments(endpoint):
    root = call(endpoint, verb="Identify", set="monet")
    assert error_code(root) == "badArgument"


def test_list_metadata_formats(endpoint):
    root = call(endpoint, verb="ListMetadataFormats")
    formats = root.findall("oai:ListMetadataFormats/oai:metadataFormat", NS)
    assert len(formats) == 1
    assert formats[0].findtext("oai:metadataPrefix", namespaces=NS) == "oai_dc"
    assert formats[0].findtext("oai:metadataNamespace", namespaces=NS) == OAI_DC_NS


def test_list_metadata_formats_for_unknown_identifier(endpoint):
    root = call(endpoint, verb="ListMetadataFormats", identifier="oai:alp:monet-999999")
    assert error_code(root) == "idDoesNotExist"


def test_list_sets_mirror_libraries(endpoint, demo_snapshot):
    root = call(endpoint, verb="ListSets")
    sets = root.findall("oai:ListSets/oai:set", NS)
    specs = [s.findtext("oai:setSpec", namespaces=NS) for s in sets]
    names = [s.findtext("oai:setName", namespaces=NS) for s in sets]
    assert specs == [lib.slug for lib in demo_snapshot.libraries]
    assert names == [lib.artist_name for lib in demo_snapshot.libraries]


def test_list_sets_never_paginates(endpoint):
    root = call(endpoint, verb="ListSets", resumptionToken="anything")
    assert error_code(root) == "badResumptionToken"


# --- GetRecord ---------------------------------------------------------------------


def test_get_record_round_trips_elements(endpoint, demo_snapshot):
    stored = demo_snapshot.record("monet-000001")
    root = call(endpoint, verb="GetRecord", identifier="oai:alp:monet-000001", metadataPrefix="oai_dc")
    record_el = root.find("oai:GetRecord/oai:record", NS)
    header = record_el.find("oai:header", NS)
    assert header.findtext("oai:identifier", namespaces=NS) == "oai:alp:monet-000001"
    assert header.findtext("oai:datestamp", namespaces=NS) == stored.created_at
    assert header.findtext("oai:setSpec", namespaces=NS) == "monet"
    payload = record_el.find("oai:metadata", NS)[0]
    assert tuple(from_oai_dc_xml(payload)) == stored.elements


def test_get_record_errors(endpoint):
    missing_id = call(endpoint, verb="GetRecord", metadataPrefix="oai_dc")
    assert error_code(missing_id) == "badArgument"
    missing_prefix = call(endpoint, verb="GetRecord", identifier="oai:alp:monet-000001")
    assert error_code(missing_prefix) == "badArgument"
    bad_prefix = call(
        endpoint, verb="GetRecord", identifier="oai:alp:monet-000001", metadataPrefix="marc21"
    )
    assert error_code(bad_prefix) == "cannotDisseminateFormat"
    unknown = call(endpoint, verb="GetRecord", identifier="oai:alp:monet-999999", metadataPrefix="oai_dc")
    assert error_code(unknown) == "idDoesNotExist"
    foreign = call(
        endpoint, verb="GetRecord", identifier="oai:elsewhere:monet-000001", metadataPrefix="oai_dc"
    )
    assert error_code(foreign) == "idDoesNotExist"


# --- list verbs: selection, filtering ------------------------------------------------


def identifiers_of(root, verb):
    if verb == "ListIdentifiers":
        headers = root.findall("oai:ListIdentifiers/oai:header", NS)
    else:
        headers = root.findall(f"oai:{verb}/oai:record/oai:header", NS)
    return [h.findtext("oai:identifier", namespaces=NS) for h in headers]


def test_list_records_single_page_when_small(endpoint, demo_snapshot):
    root = call(endpoint, verb="ListRecords", metadataPrefix="oai_dc")
    ids = identifiers_of(root, "ListRecords")
    assert ids == [f"oai:alp:{r.record_id}" for r in demo_snapshot.records]
    # single full page: no resumptionToken element at all
    assert root.find("oai:ListRecords/oai:resumptionToken", NS) is None


def test_list_identifiers_headers_only(endpoint):
    root = call(endpoint, verb="ListIdentifiers", metadataPrefix="oai_dc")
    assert root.findall(".//oai:metadata", NS) == []
    assert len(identifiers_of(root, "ListIdentifiers")) == 12


def test_set_filter(endpoint):
    root = call(endpoint, verb="ListIdentifiers", metadataPrefix="oai_dc", set="detaille")
    assert identifiers_of(root, "ListIdentifiers") == [
        "oai:alp:detaille-000001",
        "oai:alp:detaille-000002",
    ]


def test_unknown_set_yields_no_records_match(endpoint):
    root = call(endpoint, verb="ListRecords", metadataPrefix="oai_dc", set="rivera")
    assert error_code(root) == "noRecordsMatch"


def test_datestamp_window_with_day_granularity(endpoint):
    root = call(
        endpoint,
        verb="ListIdentifiers",
        metadataPrefix="oai_dc",
        **{"from": "2026-07-10", "until": "2026-07-15"},
    )
    ids = identifiers_of(root, "ListIdentifiers")
    # detaille was stamped 07-10, bergman 07-15; the until day is inclusive
    assert ids == [
        "oai:alp:bergman-000001",
        "oai:alp:bergman-000002",
        "oai:alp:detaille-000001",
        "oai:alp:detaille-000002",
    ]


def test_from_after_until_rejected(endpoint):
    root = call(
        endpoint,
        verb="ListRecords",
        metadataPrefix="oai_dc",
        **{"from": "2026-07-15", "until": "2026-07-10"},
    )
    assert error_code(root) == "badArgument"


def test_malformed_datestamp_rejected(endpoint):
    root = call(endpoint, verb="ListRecords", metadataPrefix="oai_dc", **{"from": "last week"})
    assert error_code(root) == "badArgument"


def test_empty_window_yields_no_records_match(endpoint):
    root = call(endpoint, verb="ListRecords", metadataPrefix="oai_dc", until="1900-01-01")
    assert error_code(root) == "noRecordsMatch"


def test_missing_prefix_on_list_verbs(endpoint):
    root = call(endpoint, verb="ListRecords")
    assert error_code(root) == "badArgument"


# --- pagination and tokens -------------------------------------------------------------


@pytest.fixture()
def paged(demo_snapshot):
    return OaiEndpoint(demo_snapshot, page_size=5, clock=CLOCK)


def token_of(root, verb):
    el = root.find(f"oai:{verb}/oai:resumptionToken", NS)
    return el


def test_paged_walk_is_complete_and_ordered(paged, demo_snapshot):
    harvested = []
    root = call(paged, verb="ListRecords", metadataPrefix="oai_dc")
    pages = 1
    while True:
        harvested.extend(identifiers_of(root, "ListRecords"))
        token_el = token_of(root, "ListRecords")
        if token_el is None or not (token_el.text or "").strip():
            break
        root = call(paged, verb="ListRecords", resumptionToken=token_el.text)
        pages += 1
    assert pages == 3
    assert harvested == [f"oai:alp:{r.record_id}" for r in demo_snapshot.records]
    assert len(set(harvested)) == len(harvested)


def test_token_elements_carry_cursor_and_size(paged):
    first = call(paged, verb="ListRecords", metadataPrefix="oai_dc")
    token_el = token_of(first, "ListRecords")
    assert token_el.get("completeListSize") == "12"
    assert token_el.get("cursor") == "0"
    assert token_el.text

    second = call(paged, verb="ListRecords", resumptionToken=token_el.text)
    second_token = token_of(second, "ListRecords")
    assert second_token.get("cursor") == "5"
    assert second_token.text

    final = call(paged, verb="ListRecords", resumptionToken=second_token.text)
    final_token = token_of(final, "ListRecords")
    assert final_token.get("cursor") == "10"
    assert not final_token.text  # empty element closes the walk


def test_garbage_token_rejected(paged):
    root = call(paged, verb="ListRecords", resumptionToken="not-a-token")
    assert error_code(root) == "badResumptionToken"


def test_stale_token_rejected(paged):
    stale = ResumptionToken(
        verb="ListRecords",
        offset=5,
        snapshot_id="0123456789abcdef",
        set_spec=None,
        date_from=None,
        date_until=None,
    ).encode()
    root = call(paged, verb="ListRecords", resumptionToken=stale)
    assert error_code(root) == "badResumptionToken"


def test_token_bound_to_its_verb(paged, demo_snapshot):
    minted = ResumptionToken(
        verb="ListRecords",
        offset=5,
        snapshot_id=demo_snapshot.fingerprint,
        set_spec=None,
        date_from=None,
        date_until=None,
    ).encode()
    root = call(paged, verb="ListIdentifiers", resumptionToken=minted)
    assert error_code(root) == "badResumptionToken"


def test_token_is_exclusive(paged):
    first = call(paged, verb="ListRecords", metadataPrefix="oai_dc")
    token = token_of(first, "ListRecords").text
    root = call(paged, verb="ListRecords", resumptionToken=token, metadataPrefix="oai_dc")
    assert error_code(root) == "badArgument"


def test_token_filters_survive_the_walk(demo_snapshot):
    paged = OaiEndpoint(demo_snapshot, page_size=4, clock=CLOCK)
    root = call(paged, verb="ListIdentifiers", metadataPrefix="oai_dc", set="monet")
    ids = identifiers_of(root, "ListIdentifiers")
    token_el = token_of(root, "ListIdentifiers")
    next_page = call(paged, verb="ListIdentifiers", resumptionToken=token_el.text)
    ids += identifiers_of(next_page, "ListIdentifiers")
    assert ids == [f"oai:alp:monet-{i:06d}" for i in range(1, 7)]


def test_token_codec_round_trip():
    token = ResumptionToken("ListRecords", 42, "cafe0123cafe0123", "monet", "2026-07-01T00:00:00Z", None)
    assert ResumptionToken.decode(token.encode()) == token
    with pytest.raises(TokenError):
        ResumptionToken.decode("@@@@")
    with pytest.raises(TokenError):
        ResumptionToken.decode(
            ResumptionToken("ListRecords", -1, "cafe0123cafe0123", None, None, None).encode()
        )


# --- protocol errors ----------------------------------------------------------------------


def test_bad_verb(endpoint):
    assert error_code(call(endpoint, verb="Harvest")) == "badVerb"
    assert error_code(call(endpoint)) == "badVerb"


def test_bad_verb_and_bad_argument_do_not_echo_arguments(endpoint):
    root = call(endpoint, verb="Harvest", metadataPrefix="oai_dc")
    request = root.find("oai:request", NS)
    assert request.attrib == {}
    root = call(endpoint, verb="Identify", set="monet")
    assert root.find("oai:request", NS).attrib == {}


def test_legal_error_responses_echo_arguments(endpoint):
    root = call(endpoint, verb="ListRecords", metadataPrefix="oai_dc", set="rivera")
    request = root.find("oai:request", NS)
    assert request.get("verb") == "ListRecords"
    assert request.get("set") == "rivera"


def test_illegal_argument_for_verb(endpoint):
    root = call(endpoint, verb="ListSets", metadataPrefix="oai_dc")
    assert error_code(root) == "badArgument"


# --- self-harvest equality -------------------------------------------------------------


def test_harvest_multiset_equals_store(paged, demo_snapshot):
    """Full paged harvest reproduces every stored element, record by record."""
    harvested: dict[str, Counter] = {}
    params = {"verb": "ListRecords", "metadataPrefix": "oai_dc"}
    while True:
        root = call(paged, **params)
        for record_el in root.findall("oai:ListRecords/oai:record", NS):
            identifier = record_el.find("oai:header/oai:identifier", NS).text
            rid = identifier.rsplit(":", 1)[-1]
            payload = record_el.find("oai:metadata", NS)[0]
            harvested[rid] = Counter(from_oai_dc_xml(payload))
        token_el = token_of(root, "ListRecords")
        if token_el is None or not (token_el.text or "").strip():
            break
        params = {"verb": "ListRecords", "resumptionToken": token_el.text}
    assert set(harvested) == {r.record_id for r in demo_snapshot.records}
    for record in demo_snapshot.records:
        assert harvested[record.record_id] == Counter(record.elements)
