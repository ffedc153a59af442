"""Timestamp handling, day windows, and DayLog validation."""

from datetime import date, datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from retrace.model import (
    ContextEvent,
    CoverageInterval,
    DayLog,
    DayWindow,
    GpsFix,
    ImageSample,
    TimestampError,
    day_from_dict,
    day_to_dict,
    format_timestamp,
    parse_timestamp,
    truncate_ms,
    validate_day,
)

from conftest import DAY, at


class TestTimestamps:
    def test_parse_z_suffix(self):
        t = parse_timestamp("2013-05-01T09:30:00Z")
        assert t == datetime(2013, 5, 1, 9, 30, tzinfo=timezone.utc)

    def test_parse_explicit_offset_normalizes_to_utc(self):
        t = parse_timestamp("2013-05-01T10:30:00+01:00")
        assert t == datetime(2013, 5, 1, 9, 30, tzinfo=timezone.utc)
        assert t.utcoffset() == timedelta(0)

    def test_naive_rejected(self):
        with pytest.raises(TimestampError):
            parse_timestamp("2013-05-01T09:30:00")

    def test_garbage_rejected(self):
        with pytest.raises(TimestampError):
            parse_timestamp("yesterday-ish")

    def test_sub_millisecond_truncated(self):
        t = parse_timestamp("2013-05-01T09:30:00.123456Z")
        assert t.microsecond == 123000

    def test_format_whole_second(self):
        assert format_timestamp(at(9, 30)) == "2013-05-01T09:30:00Z"

    def test_format_millisecond(self):
        assert format_timestamp(at(9, 30, 0, ms=40)) == "2013-05-01T09:30:00.040Z"

    def test_format_non_utc_input(self):
        tz = timezone(timedelta(hours=2))
        t = datetime(2013, 5, 1, 11, 30, tzinfo=tz)
        assert format_timestamp(t) == "2013-05-01T09:30:00Z"

    @given(st.integers(min_value=0, max_value=86399), st.integers(min_value=0, max_value=999))
    def test_round_trip(self, seconds, ms):
        t = at() + timedelta(seconds=seconds, milliseconds=ms)
        assert parse_timestamp(format_timestamp(t)) == t

    def test_truncate_is_idempotent(self):
        t = datetime(2013, 5, 1, 9, 30, 0, 123456, tzinfo=timezone.utc)
        assert truncate_ms(truncate_ms(t)) == truncate_ms(t)


class TestDayWindow:
    def test_utc_day(self):
        w = DayWindow.for_date(DAY)
        assert w.start == at(0)
        assert w.end == at(0) + timedelta(hours=24)

    def test_positive_offset_shifts_start_back(self):
        # local midnight in UTC+2 is 22:00 UTC the evening before
        w = DayWindow.for_date(DAY, tz_offset_minutes=120)
        assert w.start == datetime(2013, 4, 30, 22, tzinfo=timezone.utc)
        assert w.end - w.start == timedelta(hours=24)

    def test_membership_half_open(self):
        w = DayWindow.for_date(DAY)
        assert w.contains(w.start)
        assert not w.contains(w.end)
        assert w.contains(w.end - timedelta(milliseconds=1))


def valid_day() -> DayLog:
    w = DayWindow.for_date(DAY)
    return DayLog(
        window=w,
        fixes=(GpsFix(at(8), 32.65, -16.91), GpsFix(at(8, 1), 32.66, -16.92)),
        images=(ImageSample(at(9), "2013-05-01#000000", "a.png"),),
        events=(ContextEvent(at(10), "call", "incoming", 60),),
        coverage=(CoverageInterval("location", at(8), at(9)),),
    )


class TestValidateDay:
    def test_valid_day_is_clean(self):
        assert validate_day(valid_day()) == []

    def test_wrong_window_length(self):
        w = DayWindow(DAY, 0, at(0), at(23))
        bad = DayLog(window=w)
        assert any(v.field == "window" for v in validate_day(bad))

    def test_window_start_must_match_offset(self):
        w = DayWindow(DAY, 60, at(0), at(0) + timedelta(hours=24))
        bad = DayLog(window=w)
        assert any(v.field == "window.start" for v in validate_day(bad))

    def test_naive_timestamp_flagged(self):
        day = valid_day()
        bad = DayLog(
            window=day.window, fixes=(GpsFix(datetime(2013, 5, 1, 8), 32.0, -16.0),)
        )
        assert any("UTC" in v.rule for v in validate_day(bad))

    def test_fix_outside_window(self):
        day = valid_day()
        bad = DayLog(window=day.window, fixes=(GpsFix(at(8, day=date(2013, 5, 2)), 32.0, -16.0),))
        assert any("outside" in v.rule for v in validate_day(bad))

    def test_fixes_must_strictly_increase(self):
        day = valid_day()
        bad = DayLog(
            window=day.window,
            fixes=(GpsFix(at(8), 32.0, -16.0), GpsFix(at(8), 32.1, -16.1)),
        )
        assert any("strictly increasing" in v.rule for v in validate_day(bad))

    def test_nan_coordinate(self):
        day = valid_day()
        bad = DayLog(window=day.window, fixes=(GpsFix(at(8), float("nan"), -16.0),))
        assert any("NaN" in v.rule for v in validate_day(bad))

    def test_out_of_bounds_coordinates(self):
        day = valid_day()
        bad = DayLog(
            window=day.window,
            fixes=(GpsFix(at(8), 91.0, -16.0), GpsFix(at(9), 32.0, 181.0)),
        )
        rules = [v.field for v in validate_day(bad)]
        assert "fixes[0].lat" in rules
        assert "fixes[1].lon" in rules

    def test_duplicate_media_id(self):
        day = valid_day()
        bad = DayLog(
            window=day.window,
            images=(
                ImageSample(at(9), "2013-05-01#000000", "a.png"),
                ImageSample(at(9, 1), "2013-05-01#000000", "b.png"),
            ),
        )
        assert any(v.field.endswith("media_id") for v in validate_day(bad))

    def test_images_allow_equal_timestamps(self):
        day = valid_day()
        ok = DayLog(
            window=day.window,
            images=(
                ImageSample(at(9), "2013-05-01#000000", "a.png"),
                ImageSample(at(9), "2013-05-01#000001", "b.png"),
            ),
        )
        assert validate_day(ok) == []

    def test_unknown_event_channel(self):
        day = valid_day()
        bad = DayLog(window=day.window, events=(ContextEvent(at(10), "fax", "incoming", 0),))
        assert any(v.field.endswith("channel") for v in validate_day(bad))

    def test_sms_with_duration_flagged(self):
        day = valid_day()
        bad = DayLog(window=day.window, events=(ContextEvent(at(10), "sms", "incoming", 5),))
        assert any("zero duration" in v.rule for v in validate_day(bad))

    def test_negative_duration_flagged(self):
        day = valid_day()
        bad = DayLog(window=day.window, events=(ContextEvent(at(10), "call", "incoming", -1),))
        assert any("non-negative" in v.rule for v in validate_day(bad))

    def test_inverted_coverage(self):
        day = valid_day()
        bad = DayLog(window=day.window, coverage=(CoverageInterval("call", at(9), at(8)),))
        assert any("start < end" in v.rule for v in validate_day(bad))

    def test_coverage_outside_window(self):
        day = valid_day()
        bad = DayLog(
            window=day.window,
            coverage=(
                CoverageInterval("call", at(8) - timedelta(hours=9), at(9)),
            ),
        )
        assert any("outside the day window" in v.rule for v in validate_day(bad))

    def test_violations_accumulate(self):
        w = DayWindow.for_date(DAY)
        bad = DayLog(
            window=w,
            fixes=(GpsFix(at(8), float("nan"), 181.0), GpsFix(at(7), 32.0, -16.0)),
            events=(ContextEvent(at(10), "fax", "sideways", -3),),
        )
        assert len(validate_day(bad)) >= 4


class TestSerialization:
    def test_day_round_trip(self):
        day = valid_day()
        assert day_from_dict(day_to_dict(day)) == day

    def test_document_is_plain_data(self):
        doc = day_to_dict(valid_day())
        assert set(doc) == {"window", "fixes", "images", "events", "coverage"}
        assert doc["fixes"][0] == {"t": "2013-05-01T08:00:00Z", "lat": 32.65, "lon": -16.91}
