"""Tag documents used by the codec round-trip tests.

The first group mirrors the format examples that ship with the prompt set
(characters, outline, chapter, draft, performances, advice, verdict) in the
raw, unevenly indented shape a model would send back. The rest are
generated variations.
"""

from screenwright import tags

CHARACTERS_EXAMPLE = """Here are the characters:
<characters>
    <character_1>
        <full_name>Iris Nemo</full_name>
        <character_introduction>Dr. Iris Nemo, a brilliant quantum physicist in her early 40s, is a determined and resilient woman. Growing up in a small coastal town, Iris was always fascinated by ...</character_introduction>
    </character_1>
    <character_2>
        <full_name>Maxwell Carter</full_name>
        <character_introduction>Maxwell Max Carter, an experienced astronaut in his late 30s, is a rugged and resourceful man. Raised in a military family, Max developed a ...</character_introduction>
    </character_2>
    <character_3>
        <full_name>Amara Patel</full_name>
        <character_introduction>Amara Patel, a brilliant astrophysicist in her late 20s, is a woman of intellect and introversion. Growing up in a small rural town, Amara always felt like an outsider, seeking ...</character_introduction>
    </character_3>
</characters>"""

OUTLINE_AVA = """<outline>
<plot_1>
Ava discovers the magical app and begins to use it to alter reality, but she soon realizes that the app's magic comes at a terrible price.
Scene: Characters: Ava Rose
</plot_1>
<plot_1a>
Ava discovers the app and starts to use it to improve her life and the lives of her friends.
Scene: the town where Ava lives. Characters: Ava Rose
</plot_1a>
<plot_1b>
Ava's friends become suspicious of her sudden changes and start to distance themselves from her.
Scene: the town where Ava lives. Characters: Ava Rose
</plot_1b>
<plot_2>
Ava confides in her best friend, Tess, about the app's dark side, and the two girls try to figure out a way to stop the app's power from consuming Ava's life.
Scene: Characters: Ava Rose, Tess Sawyer
</plot_2>
<plot_2a>
Tess and Ava search the app's code for a way out.
Scene: Tess's garage. Characters: Ava Rose, Tess Sawyer
</plot_2a>
</outline>"""

OUTLINE_NEMO = """<outline>
    <plot_1>
        Dr. Iris Nemo, a brilliant quantum physicist, discovers that entire colonies are disappearing due to malfunctioning teleportation devices. She investigates further and uncovers evidence pointing to the existence of a parallel universe. Scene: Dr. Nemo's lab, analyzing data and uncovering clues about the disappearing colonies. Characters: Dr. Iris Nemo
    </plot_1>
        <plot_1a>
            Dr. Nemo decides to venture into the space-time continuum to locate the lost colonies and understand the cause behind the malfunctioning teleportation devices. Scene: Dr. Nemo studying theories and formulating a plan to enter the space-time continuum. Characters: Dr. Iris Nemo
        </plot_1a>
        <plot_1b>
            In the parallel universe, Dr. Nemo encounters the malevolent entity manipulating the teleportation technology. She learns about its motives and the destructive consequences on the lost colonies. Scene: Parallel universe, where Dr. Nemo witnesses the malevolent entity's influence and its impact on the colonies. Characters: Dr. Iris Nemo
        </plot_1b>
        <plot_1c>
            Dr. Nemo realizes that she must outwit the malevolent entity and repair the corrupted teleportation system to prevent humanity from being teleported into the destructive parallel universe. Scene: Dr. Nemo formulating a plan to confront the malevolent entity and repair the teleportation system. Characters: Dr. Iris Nemo
        </plot_1c>
        <plot_1d>
            Dr. Nemo confronts her past mistakes and personal guilt related to her early experiments with teleportation. She finds the strength to rectify those mistakes and seeks redemption. Scene: Dr. Nemo reflecting on her past failures and making a personal commitment to set things right. Characters: Dr. Iris Nemo
        </plot_1d>
    <plot_2>
        Maxwell Carter, an experienced astronaut, is stranded on a partially teleported space station due to the malfunctioning teleportation devices. He struggles with survival and questions his understanding of the universe. Scene: Stranded space station, where Max fights for survival and contemplates the implications of the malfunction. Characters: Maxwell Carter
    </plot_2>
        <plot_2a>
            ...
            Scene: ... Characters: Maxwell Carter
        </plot_2a>
</outline>"""

CHAPTER_EXAMPLE = """<chapter>
At first light, in Emma Taylor's room, Dorothy Smith serves porridge to persuade Emma Taylor to eat, and Emma Taylor smashes the bowl to show her refusal...
</chapter>"""

DRAFT_EXAMPLE = """<script_draft>

<scene_heading>
INT.; Inside Emma Taylor's room; DAY.
</scene_heading>

<character_performance>
<character>Dorothy Smith</character>
<performance>Dorothy Smith enters the room and walks over to Emma with porridge to persuade Emma to eat.</performance>
</character_performance>

<character_performance>
<character>Emma Taylor</character>
<performance>Emma smashes the bowl, saying she won't eat.</performance>
</character_performance>

<character_performance>
<character>Dorothy Smith</character>
<performance>...</performance>
</character_performance>

</script_draft>"""

PERFORMANCE_WALKS = """<detailed_performance>
<character>Dorothy Smith</character>
<action>Dorothy Smith enters the room, sets down various dishes, carries a bowl of hot porridge, and walks over to Emma Taylor.</action>
<parenthetical></parenthetical>
<dialogue></dialogue>
</detailed_performance>"""

PERFORMANCE_PERSUADES = """<detailed_performance>
<character>Dorothy Smith</character>
<action></action>
<parenthetical>(cautiously, to Emma Taylor)</parenthetical>
<dialogue>My miss, you still have to take care of your body, so just eat something.</dialogue>
</detailed_performance>"""

PERFORMANCE_SLAMS = """<detailed_performance>
<character>Emma Taylor</character>
<action>Emma Taylor slams her bowl on the floor.</action>
<parenthetical>(capriciously, to Dorothy Smith)</parenthetical>
<dialogue>No no no, I just won't eat!</dialogue>
</detailed_performance>"""

ADVICE_NONE = "<advice>None</advice>"
ADVICE_TEXT = """<advice>
Give Maxwell Carter a personal stake in the mission and show what drives him to become Iris' ally.
</advice>"""

VERDICTS = [
    "<explanation>A keeps every thread alive.</explanation>\n<verdict>A</verdict>",
    "<explanation>B is tighter.</explanation>\n<verdict>B</verdict>",
    "<explanation>Both are equally strong.</explanation>\n<verdict>TIE</verdict>",
]

APPENDIX_DOCS = [
    (CHARACTERS_EXAMPLE, tags.CHARACTERS),
    (OUTLINE_AVA, tags.OUTLINE),
    (OUTLINE_NEMO, tags.OUTLINE),
    (CHAPTER_EXAMPLE, tags.CHAPTER),
    (DRAFT_EXAMPLE, tags.SCRIPT_DRAFT),
    (PERFORMANCE_WALKS, tags.DETAILED_PERFORMANCE),
    (PERFORMANCE_PERSUADES, tags.DETAILED_PERFORMANCE),
    (PERFORMANCE_SLAMS, tags.DETAILED_PERFORMANCE),
    (ADVICE_NONE, tags.ADVICE),
    (ADVICE_TEXT, tags.ADVICE),
] + [(v, tags.VERDICT) for v in VERDICTS]


def _generated():
    docs = []
    for n in range(3, 7):
        body = "".join(
            f"<character_{i}>\n  <full_name>Person {i}</full_name>\n"
            f"  <character_introduction>Person {i} is {20 + i} and restless.</character_introduction>\n</character_{i}>\n"
            for i in range(1, n + 1)
        )
        docs.append((f"Sure!\n<characters>\n{body}</characters>\nHope this helps.", tags.CHARACTERS))
    for tops in range(1, 5):
        for subs in range(1, 4):
            parts = []
            for t in range(1, tops + 1):
                parts.append(f"<plot_{t}>\nTop {t}.\nScene: Characters: Person 1\n</plot_{t}>")
                for s in range(subs):
                    letter = chr(97 + s)
                    parts.append(f"<plot_{t}{letter}>\nSub {t}{letter} mentions the Scene: of a crime.\n"
                                 f"Scene: room {t}{letter}. Characters: Person 1, Person 2\n</plot_{t}{letter}>")
            docs.append(("<outline>\n" + "\n".join(parts) + "\n</outline>", tags.OUTLINE))
    for i in range(6):
        events = "".join(
            f"<character_performance><character>Person {j % 2 + 1}</character>"
            f"<performance>Person {j % 2 + 1} does thing {j}.</performance></character_performance>\n"
            for j in range(i + 1)
        )
        place = ["INT.", "EXT.", "INT./EXT."][i % 3]
        docs.append((f"<script_draft>\n<scene_heading>{place}; Hall {i}; NIGHT.</scene_heading>\n{events}</script_draft>",
                     tags.SCRIPT_DRAFT))
    for i in range(6):
        perfs = "".join(
            f"<detailed_performance><character>Person 1</character><action>moves {j}</action>"
            f"<parenthetical>{'(softly)' if j % 2 else ''}</parenthetical><dialogue>{'Line.' if j % 2 else ''}</dialogue>"
            f"</detailed_performance>"
            for j in range(1, i + 2)
        )
        docs.append((f"<episode><scene_heading>EXT.; Pier; DAWN.</scene_heading>{perfs}</episode>", tags.EPISODE))
    for i in range(4):
        docs.append((f"<chapter>  Chapter {i} with <b>bold</b> text and a stray < sign.  </chapter>", tags.CHAPTER))
    for i, body in enumerate(["None", "  None  ", "Cut plot_2b.", "Line one.\nLine two.", "Use <i>less</i> exposition."]):
        docs.append((f"Editor notes {i}:\n<advice>{body}</advice>", tags.ADVICE))
    for v in ("A", "B", "TIE"):
        docs.append((f"Thinking...\n<explanation>\nReasons for {v}.\n</explanation>\n\n<verdict> {v} </verdict>\nDone.",
                     tags.VERDICT))
    return docs


CORPUS = APPENDIX_DOCS + _generated()
