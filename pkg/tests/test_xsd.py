"""The vendored-schema validator itself: accepts legal documents, names defects."""

import pytest

from alp.catalog import BibRecord, DcElement
from alp.metadata import to_oai_dc_bytes
from alp.xsd import ValidationError, default_schema_set, validate_oai_response

VALID_IDENTIFY = b"""<?xml version="1.0" encoding="UTF-8"?>
<OAI-PMH xmlns="http://www.openarchives.org/OAI/2.0/"
         xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"
         xsi:schemaLocation="http://www.openarchives.org/OAI/2.0/ http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd">
  <responseDate>2026-07-01T09:00:00Z</responseDate>
  <request verb="Identify">http://localhost:8000/oai</request>
  <Identify>
    <repositoryName>Test</repositoryName>
    <baseURL>http://localhost:8000/oai</baseURL>
    <protocolVersion>2.0</protocolVersion>
    <adminEmail>curator@example.org</adminEmail>
    <earliestDatestamp>2026-07-01T09:00:00Z</earliestDatestamp>
    <deletedRecord>no</deletedRecord>
    <granularity>YYYY-MM-DDThh:mm:ssZ</granularity>
  </Identify>
</OAI-PMH>
"""


def test_schema_set_loads_once():
    assert default_schema_set() is default_schema_set()


def test_valid_identify_passes():
    validate_oai_response(VALID_IDENTIFY)


def test_wrong_root_element_rejected():
    with pytest.raises(ValidationError):
        validate_oai_response(b"<html><body>hi</body></html>")


def test_missing_required_child_rejected():
    broken = VALID_IDENTIFY.replace(
        b"<protocolVersion>2.0</protocolVersion>", b""
    )
    with pytest.raises(ValidationError):
        validate_oai_response(broken)


def test_bad_datestamp_format_rejected():
    broken = VALID_IDENTIFY.replace(
        b"<responseDate>2026-07-01T09:00:00Z</responseDate>",
        b"<responseDate>yesterday</responseDate>",
    )
    with pytest.raises(ValidationError):
        validate_oai_response(broken)


def test_illegal_child_inside_verb_payload_rejected():
    broken = VALID_IDENTIFY.replace(
        b"<deletedRecord>no</deletedRecord>",
        b"<deletedRecord>no</deletedRecord><mood>good</mood>",
    )
    with pytest.raises(ValidationError):
        validate_oai_response(broken)


def test_illegal_enumeration_value_rejected():
    broken = VALID_IDENTIFY.replace(
        b"<deletedRecord>no</deletedRecord>",
        b"<deletedRecord>sometimes</deletedRecord>",
    )
    with pytest.raises(ValidationError):
        validate_oai_response(broken)


def test_qualified_dc_payload_validates_standalone():
    record = BibRecord(
        record_id="monet-000001",
        library_slug="monet",
        elements=(
            DcElement("title", "Du dessin et de la couleur", lang="fre"),
            DcElement("date", "1885", qualifier="issued"),
        ),
    )
    default_schema_set().validate(to_oai_dc_bytes(record))


def test_validation_error_carries_a_path():
    broken = VALID_IDENTIFY.replace(
        b"<deletedRecord>no</deletedRecord>",
        b"<deletedRecord>sometimes</deletedRecord>",
    )
    with pytest.raises(ValidationError) as exc:
        validate_oai_response(broken)
    assert "deletedRecord" in str(exc.value) or "deletedRecord" in exc.value.path
