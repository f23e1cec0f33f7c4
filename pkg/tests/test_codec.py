import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from screenwright import codec, tags
from screenwright.errors import (
    ArityViolation,
    CardinalityOutOfRange,
    ComponentCount,
    DuplicateName,
    EmptyTopPlot,
    ForeignCharacter,
    LabelGap,
    MissingSceneHeading,
    MissingTag,
    OrphanSubplot,
    UnbalancedTag,
    UnknownCharacterName,
)
from screenwright.model import (
    Advice,
    Chapter,
    Character,
    CharacterSet,
    DetailedPerformance,
    Episode,
    Placement,
    PlotLabel,
    SceneHeading,
    Screenplay,
    ScriptDraft,
    DraftEvent,
    parse_scene_heading,
    word_count,
)

from conftest import make_cast, make_outline
from format_examples import (
    CHARACTERS_EXAMPLE,
    CORPUS,
    DRAFT_EXAMPLE,
    OUTLINE_AVA,
    OUTLINE_NEMO,
    PERFORMANCE_PERSUADES,
    PERFORMANCE_WALKS,
)


def parse(raw, schema):
    return tags.parse_tag_document(raw, schema)


# -- tag parsing ---------------------------------------------------------------

def test_advice_none_parses_to_sentinel():
    doc = parse("<advice>None</advice>", tags.ADVICE)
    assert doc.root("advice").text == "None"
    assert codec.extract_advice(doc).is_none


def test_advice_sentinel_needs_exact_body():
    assert not codec.extract_advice(parse("<advice>None.</advice>", tags.ADVICE)).is_none
    assert not codec.extract_advice(parse("<advice>none</advice>", tags.ADVICE)).is_none


@pytest.mark.parametrize("schema", list(tags.ALL_SCHEMAS.values()), ids=lambda s: s.name)
def test_empty_input_is_missing_tag(schema):
    with pytest.raises(MissingTag):
        parse("", schema)


def test_unbalanced_tag_reports_byte_offset():
    raw = "é <chapter> never closed"
    with pytest.raises(UnbalancedTag) as info:
        parse(raw, tags.CHAPTER)
    assert info.value.offset == len("é ".encode())


def test_arity_violation_on_two_chapters():
    with pytest.raises(ArityViolation):
        parse("<chapter>a</chapter><chapter>b</chapter>", tags.CHAPTER)


def test_tag_names_are_case_sensitive():
    with pytest.raises(MissingTag):
        parse("<Chapter>x</Chapter>", tags.CHAPTER)


def test_unknown_tags_stay_in_leaf_text():
    doc = parse("prose <chapter>a <b>bold</b> move</chapter> trailing", tags.CHAPTER)
    assert doc.root("chapter").text == "a <b>bold</b> move"


@pytest.mark.parametrize("raw,schema", CORPUS, ids=[f"doc{i}" for i in range(len(CORPUS))])
def test_corpus_render_is_fixpoint(raw, schema):
    canon = tags.canonicalize(raw, schema)
    assert tags.render_document(parse(canon, schema)) == canon
    assert tags.canonicalize(canon, schema) == canon


def test_corpus_size():
    assert len(CORPUS) >= 50


# -- characters --------------------------------------------------------------------

def test_characters_example_in_order():
    cs = codec.extract_characters(parse(CHARACTERS_EXAMPLE, tags.CHARACTERS))
    assert cs.names == ("Iris Nemo", "Maxwell Carter", "Amara Patel")


def _chars_doc(n, dup=False):
    body = "".join(
        f"<character_{i}><full_name>{'Same Name' if dup else f'Name {i}'}</full_name>"
        f"<character_introduction>intro</character_introduction></character_{i}>"
        for i in range(1, n + 1)
    )
    return parse(f"<characters>{body}</characters>", tags.CHARACTERS)


def test_two_characters_out_of_range():
    with pytest.raises(CardinalityOutOfRange):
        codec.extract_characters(_chars_doc(2))


def test_seven_characters_out_of_range():
    with pytest.raises(CardinalityOutOfRange):
        codec.extract_characters(_chars_doc(7))


def test_six_characters_accepted():
    cs = codec.extract_characters(_chars_doc(6))
    assert len(cs) == 6 == len(set(cs.names))


def test_duplicate_names_rejected():
    with pytest.raises(DuplicateName):
        codec.extract_characters(_chars_doc(3, dup=True))


def test_character_name_rejects_angle_brackets():
    with pytest.raises(Exception):
        Character("Bad <Name>", "intro")


# -- outline -------------------------------------------------------------------------

def test_ava_outline_grouping_and_fields():
    cs = CharacterSet((Character("Ava Rose", "i"), Character("Tess Sawyer", "i"), Character("Third One", "i")))
    out = codec.extract_outline(parse(OUTLINE_AVA, tags.OUTLINE), cs)
    top1 = out.top_plots[0]
    assert [str(s.label) for s in top1.subplots] == ["plot_1a", "plot_1b"]
    first = top1.subplots[0]
    assert first.scene == "the town where Ava lives"
    assert first.involved_characters == ("Ava Rose",)
    assert top1.scene == ""
    assert out.top_plots[1].involved_characters == ("Ava Rose", "Tess Sawyer")


def test_inline_markers_outline():
    out = codec.extract_outline(parse(OUTLINE_NEMO, tags.OUTLINE))
    assert [str(l) for l in out.labels] == ["plot_1a", "plot_1b", "plot_1c", "plot_1d", "plot_2a"]
    assert out.subplots[0].scene.startswith("Dr. Nemo studying theories")
    assert out.subplots[0].involved_characters == ("Dr. Iris Nemo",)


def test_top_plot_without_subplots_rejected():
    doc = parse("<outline><plot_1>x\nScene: Characters: A</plot_1></outline>", tags.OUTLINE)
    with pytest.raises(EmptyTopPlot):
        codec.extract_outline(doc)


def test_label_gap():
    raw = ("<outline><plot_1>x\nScene: Characters: A</plot_1><plot_1a>y\nScene: s. Characters: A</plot_1a>"
           "<plot_1c>z\nScene: s. Characters: A</plot_1c></outline>")
    with pytest.raises(LabelGap):
        codec.extract_outline(parse(raw, tags.OUTLINE))


def test_orphan_subplot():
    raw = ("<outline><plot_1>x\nScene: Characters: A</plot_1><plot_1a>y\nScene: s. Characters: A</plot_1a>"
           "<plot_2a>z\nScene: s. Characters: A</plot_2a></outline>")
    with pytest.raises(OrphanSubplot):
        codec.extract_outline(parse(raw, tags.OUTLINE))


def test_more_than_26_subplots_is_an_error():
    parts = ["<plot_1>x\nScene: Characters: A</plot_1>"]
    parts += [f"<plot_1{chr(97 + i)}>y\nScene: s. Characters: A</plot_1{chr(97 + i)}>" for i in range(26)]
    parts.append("<plot_1aa>y\nScene: s. Characters: A</plot_1aa>")
    with pytest.raises(LabelGap):
        codec.extract_outline(parse("<outline>" + "".join(parts) + "</outline>", tags.OUTLINE))


def test_unknown_character_strict_and_lenient(cast):
    raw = "<outline><plot_1>x\nScene: Characters: Nobody</plot_1><plot_1a>y\nScene: s. Characters: Nobody</plot_1a></outline>"
    doc = parse(raw, tags.OUTLINE)
    with pytest.raises(UnknownCharacterName):
        codec.extract_outline(doc, cast)
    out = codec.extract_outline(doc, cast, strict=False)
    assert out.subplots[0].involved_characters == ("Nobody",)


def test_three_by_two_outline_order():
    out = make_outline((2, 2, 2))
    back = codec.extract_outline(parse(codec.render_outline(out), tags.OUTLINE), make_cast())
    assert back == out
    assert [str(l) for l in back.labels] == ["plot_1a", "plot_1b", "plot_2a", "plot_2b", "plot_3a", "plot_3b"]


# -- scene headings, drafts, performances -------------------------------------------------

def test_scene_heading_int():
    h = parse_scene_heading("INT.; Inside Emma Taylor's room; DAY.")
    assert (h.placement, h.location, h.time_of_day) == (Placement.INT, "Inside Emma Taylor's room", "DAY")


def test_scene_heading_ext():
    h = parse_scene_heading("EXT.; Mars colony dome; NIGHT.")
    assert (h.placement, h.location, h.time_of_day) == (Placement.EXT, "Mars colony dome", "NIGHT")


def test_scene_heading_other_keeps_raw():
    h = parse_scene_heading("INT./EXT.; Car; DAY")
    assert h.placement is Placement.OTHER and h.raw_placement == "INT./EXT."
    assert parse_scene_heading(h.render()) == h


def test_scene_heading_needs_three_parts():
    with pytest.raises(ComponentCount):
        parse_scene_heading("Inside the lab")


def test_porridge_draft():
    d = codec.extract_draft(parse(DRAFT_EXAMPLE, tags.SCRIPT_DRAFT), PlotLabel(1, "a"),
                            ["Dorothy Smith", "Emma Taylor"])
    assert d.scene_heading == SceneHeading(Placement.INT, "Inside Emma Taylor's room", "DAY")
    assert d.events[0].character == "Dorothy Smith"
    assert len(d.events) == 3


def test_draft_foreign_character():
    with pytest.raises(ForeignCharacter):
        codec.extract_draft(parse(DRAFT_EXAMPLE, tags.SCRIPT_DRAFT), PlotLabel(1, "a"), ["Emma Taylor"])


def test_draft_heading_missing_or_late():
    ev = "<character_performance><character>A</character><performance>p</performance></character_performance>"
    with pytest.raises(MissingSceneHeading):
        codec.extract_draft(parse(f"<script_draft>{ev}</script_draft>", tags.SCRIPT_DRAFT), PlotLabel(1, "a"))
    late = f"<script_draft>{ev}<scene_heading>INT.; a; DAY.</scene_heading></script_draft>"
    with pytest.raises(MissingSceneHeading):
        codec.extract_draft(parse(late, tags.SCRIPT_DRAFT), PlotLabel(1, "a"))


def test_action_only_performance_is_valid():
    p = codec.extract_performance(parse(PERFORMANCE_WALKS, tags.DETAILED_PERFORMANCE))
    assert p.dialogue == "" and p.parenthetical == "" and p.action


def test_spoken_performance():
    p = codec.extract_performance(parse(PERFORMANCE_PERSUADES, tags.DETAILED_PERFORMANCE))
    assert p.parenthetical == "(cautiously, to Emma Taylor)"
    assert p.dialogue.startswith("My miss")


def test_parenthetical_without_dialogue_rejected():
    from screenwright.errors import ConstraintViolation
    raw = ("<detailed_performance><character>A</character><action>x</action>"
           "<parenthetical>(softly)</parenthetical><dialogue></dialogue></detailed_performance>")
    with pytest.raises(ConstraintViolation):
        codec.extract_performance(parse(raw, tags.DETAILED_PERFORMANCE))


# -- screenplay text ---------------------------------------------------------------------------

def test_action_line_rendering():
    ep = Episode(PlotLabel(1, "a"), SceneHeading(Placement.INT, "Room", "DAY"),
                 (DetailedPerformance("Dorothy Smith", "walks over to Emma Taylor."),))
    assert codec.render_episode_text(ep).split("\n") == [
        "INT.; Room; DAY.", "Dorothy Smith:", "[walks over to Emma Taylor.]"]


# -- property tests ------------------------------------------------------------------------------

text = st.text(alphabet=st.characters(blacklist_characters="<>\r", blacklist_categories=("Cs",)),
               min_size=1, max_size=40).map(lambda s: " ".join(s.split())).filter(bool)
name = st.from_regex(r"[A-Z][a-z]{1,8} [A-Z][a-z]{1,8}", fullmatch=True)


@st.composite
def performances(draw, names=None):
    who = draw(st.sampled_from(names)) if names else draw(name)
    dialogue = draw(st.one_of(st.just(""), text))
    paren = draw(st.one_of(st.just(""), text)) if dialogue else ""
    action = draw(text) if not dialogue else draw(st.one_of(st.just(""), text))
    return DetailedPerformance(who, action, paren, dialogue)


@st.composite
def character_sets(draw):
    names = draw(st.lists(name, min_size=3, max_size=6, unique=True))
    return CharacterSet(tuple(Character(n, draw(text)) for n in names))


@given(character_sets())
def test_characters_roundtrip(cs):
    assert codec.extract_characters(parse(codec.render_characters(cs), tags.CHARACTERS)) == cs


@given(performances())
def test_performance_roundtrip(p):
    assert codec.extract_performance(parse(codec.render_performance(p), tags.DETAILED_PERFORMANCE)) == p


@given(performances())
def test_performance_constraint_holds(p):
    assert p.dialogue or not p.parenthetical


@given(text, text)
def test_chapter_and_advice_roundtrip(a, b):
    ch = Chapter(PlotLabel(1, "a"), a)
    assert codec.extract_chapter(parse(codec.render_chapter(ch), tags.CHAPTER), ch.subplot_label) == ch
    adv = Advice.from_body(b)
    assert codec.extract_advice(parse(codec.render_advice(adv), tags.ADVICE)) == adv


heading_part = st.from_regex(r"[A-Za-z][A-Za-z' ]{0,15}[A-Za-z]", fullmatch=True)


@st.composite
def headings(draw):
    placement = draw(st.sampled_from([Placement.INT, Placement.EXT]))
    return SceneHeading(placement, draw(heading_part), draw(heading_part))


@given(headings(), st.lists(performances(["Ann Lee", "Bo Kim"]), min_size=1, max_size=6))
def test_episode_roundtrip(h, perfs):
    ep = Episode(PlotLabel(2, "b"), h, tuple(perfs))
    assert codec.extract_episode(parse(codec.render_episode(ep), tags.EPISODE), ep.subplot_label) == ep


@given(headings(), st.lists(st.tuples(st.sampled_from(["Ann Lee", "Bo Kim"]), text), min_size=1, max_size=6))
def test_draft_roundtrip(h, evs):
    d = ScriptDraft(PlotLabel(1, "c"), h, tuple(DraftEvent(c, g) for c, g in evs))
    assert codec.extract_draft(parse(codec.render_draft(d), tags.SCRIPT_DRAFT), d.subplot_label) == d


flat = st.from_regex(r"[A-Za-z][A-Za-z ,.!?']{0,30}[a-z.!?]", fullmatch=True)


@st.composite
def screen_performances(draw):
    who = draw(st.sampled_from(["Ann Lee", "Bo Kim"]))
    dialogue = draw(st.one_of(st.just(""), flat))
    paren = draw(st.one_of(st.just(""), flat.map(lambda s: f"({s})"))) if dialogue else ""
    action = draw(flat) if not dialogue else draw(st.one_of(st.just(""), flat))
    return DetailedPerformance(who, action, paren, dialogue)


@settings(max_examples=60)
@given(st.lists(st.tuples(headings(), st.lists(screen_performances(), min_size=1, max_size=5)),
                min_size=1, max_size=4))
def test_screenplay_text_roundtrip(eps):
    labels = [PlotLabel(1, chr(97 + i)) for i in range(len(eps))]
    sp = Screenplay(tuple(Episode(l, h, tuple(p)) for l, (h, p) in zip(labels, eps)))
    text_ = codec.render_screenplay(sp)
    assert codec.parse_screenplay(text_, labels, ["Ann Lee", "Bo Kim"]) == sp
    assert codec.render_screenplay(codec.parse_screenplay(text_, labels, ["Ann Lee", "Bo Kim"])) == text_


@given(st.lists(st.integers(1, 4), min_size=1, max_size=4))
def test_outline_roundtrip_and_grouping(shape):
    out = make_outline(tuple(shape))
    back = codec.extract_outline(parse(codec.render_outline(out), tags.OUTLINE), make_cast())
    assert back == out
    for top in back.top_plots:
        assert all(s.label.top_index == top.label.top_index for s in top.subplots)


# -- word count ------------------------------------------------------------------------------------

def test_word_count_examples():
    assert word_count("") == 0
    assert word_count("a b  c\n d") == 4


@given(st.text())
def test_word_count_whitespace_invariance(s):
    assert word_count(s) == word_count("  " + s + "\n")
    assert word_count(s) == word_count(" ".join(s.split()))
