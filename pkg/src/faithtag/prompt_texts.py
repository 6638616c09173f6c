"""Template texts for the few-shot tagging and summarization prompts,
plus the annotation guideline document served to the UI.

The tagging templates follow a fixed output protocol: the token-level
tags appear between ``<TG>`` markers in inline ``word(TAG)`` form, and
the summary-level missing-information verdict between ``<MI>`` markers.
"""

# ---------------------------------------------------------------------------
# Tagging system prompts
# ---------------------------------------------------------------------------

TAGGING_9_SYSTEM = """Given a set of dialogues and its summary, the first task is to do token-level classification. Analyze each token in the summary (not the meaning of the entire sentence or phrase) and label each token based on following guidelines:
O = Not Hallucinated
W =  Wrong person reference, only applies to tokens mentioning humans not present in the dialogue or in cases where the actions taken in the summary sentence are as per the dialogue but by the wrong human.
C = Circumstantial error, applies in the predicate of a sentence when events or facts mentioned in the summary are completely wrong as they never were mentioned in the dialogue.
OB = Object error, only applies to inanimate objects incorrectly mentioned in the summary because a different object is mentioned in the dialogue for similar context.
N = uncommon errors like tense errors

Once the token-level classification is done, the second task is to determine whether there is any important information from the dialogue missing in the summary. Answer 'yes' if there is any missing information else 'No'."""

TAGGING_3_SYSTEM = """Given a set of dialogues and its summary, the first task is to do token-level classification based on whether it is hallucinated or not. Use the following tag classes to label each token of the summary.
O = Not Hallucinated,
W =  Wrong person reference,
C = Circumstantial error,
OB = Object error,
N = uncommon errors like tense errors
M = Missing information
Once the token-level classification is done, the second task is to determine whether there is any important information from the dialogue missing in the summary. Answer 'yes' if there is any missing information else 'No'."""

TAGGING_6_SYSTEM = """Given a set of dialogues and its summary, the first task is to do token-level classification. Analyze each token in the summary (not the meaning of the entire sentence or phrase) and label the token based on following guidelines:
O = Not Hallucinated,
W =  Wrong person reference, only applies to humans incorrectly mentioned in the summary
C = Circumstantial error, applies in the predicate of a sentence when events or facts are completely wrong
OB = Object error, only applies to inanimate objects incorrectly mentioned in the summary
N = uncommon errors like tense errors

Once the token-level classification is done, the second task is to determine whether there is any important information from the dialogue missing in the summary. Answer 'yes' if there is any missing information else 'No'."""

# The eighth template reuses the sixth's guideline text; only the worked
# answers change (no explanations).
TAGGING_8_SYSTEM = TAGGING_6_SYSTEM

# ---------------------------------------------------------------------------
# Worked examples shared by the chat-history tagging templates
# ---------------------------------------------------------------------------

EXAMPLE_1 = """Dialogue- "Mary: hey, im kinda broke, lend me a few box
Carter: okay, give me an hour, im at the train station
Mary: cool, thanks"

Summary- "Adam will lend Mary a box." """.rstrip()

EXAMPLE_2 = """Dialogue- "Ernest: hey Mike, did you park your car on our street?
Mike: no, took it into garage today
Ernest: ok good
Mike: why?
Ernest: someone just crashed into a red honda looking just like yours
Mike: lol lucky me"

Summary- "Mike took his car to the garage today because it had been hit by another car." """.rstrip()

EXAMPLE_3 = """Dialogue- "Anne: You were right, he was lying to me :/
Irene: Oh no, what happened?
Jane: who? that Mark guy?
Anne: yeah, he told me he's 30, today I saw his passport - he's 40
Irene: You sure it's so important?
Anne: he lied to me Irene"

Summary- "Mark lied to Anne about his age. He's 40 now." """.rstrip()

TAG_LINE_1 = "Tags- <TG>Adam(W) will(O) lend(O) Mary(O) a(O) box(OB) .(O)<TG>"
TAG_LINE_2 = "Tags- <TG>Mike(O) took(O) his(O) car(O) to(O) the(O) garage(O) today(O) because(C) it(OB) had(N) been(N) hit(O) by(O) another(O) car(O) .(O)<TG>"
TAG_LINE_3 = "Tags- <TG>Mark(O) lied(O) to(O) Anne(O) about(O) his(O) age(O) .(O) He's(O) 40(O) now(O) .(O)<TG>"

MI_YES = "Missing Information- <MI>Yes<MI>"
MI_NO = "Missing Information- <MI>No<MI>"

_MISSING_NOTE_1 = 'There is important missing information that Carter will need another 1 hour to reach and lend money. Hence "Yes" for the missing information'
_MISSING_NOTE_2 = 'There is important missing information that Ernst is relieved as Mike\'s car is ok. Hence "Yes" for the missing information'
_MISSING_NOTE_3 = 'There is no important missing information in the summary. Hence "No" for the missing information.'

ANSWER_9_1 = f"{TAG_LINE_1}\n\n{_MISSING_NOTE_1}\n\n{MI_YES}"
ANSWER_9_2 = f"{TAG_LINE_2}\n\n{_MISSING_NOTE_2}\n\n{MI_YES}"
ANSWER_9_3 = f"{TAG_LINE_3}\n\n{_MISSING_NOTE_3}\n\n{MI_NO}"

_EXPLANATION_3_1 = """Explanation - Let's think step by step. The dialogue is about "Mary being broke and asking Carter for money.  Carter is at the train station and he will take an hour to give it to Mary". In the summary:
1. Adam is the wrong person lending the money as there is no reference of Adam in the Dialogue. It should be Carter. This is Wrong Reference (W) from the tokens described above
2. the next tokens i.e "will lend Mary a" are correct and hence each token is labeled (O) respectively
3. "box" is a slang for "money" but when summarizing no physical box is being lent. So a Wrong Object (OB) is being referenced.
4. the punctuation '.' is ok and hence (O) for it."""

_EXPLANATION_3_2 = """Explanation - Let's think step by step. The dialogue is about "Mike took his car into garage today. Ernest is relieved as someone had just crashed into a red Honda which looks like Mike's.". In the summary:
1. The tokens "Mike took his car to the garage today" are correct hence each token is labeled (O) respectively
2. "because" is incorrect as there is no reason and there is no corelation between him taking the car for servicing and someone elses car being hit. Its a Circumstancial Error and hence is labeled (C).
3. "it" is a wrong object reference because it refers to Mike's car which was never hit. So a Wrong Object (OB) is being referenced.
4. the next two tokens "had been" are uncommon hallucination tense errors indicating Mike took his car to the garage after the accident. Hence they iare labeled (N) respectively.
5. the remaining tokens "hit by another car." is factually correct as someone's car was hit. Hence each token is labeled (O) respectively"""

_EXPLANATION_3_3 = """Explanation - Let's think step by step. The dialogue is about "Mark lied to Anne about his age. Mark is 40." . In the summary:
1. The tokens "Mark lied to Anne about his age. He's 40 now." are correct hence each token is labeled (O) respectively"""

ANSWER_3_1 = f"{_EXPLANATION_3_1}\n\n{TAG_LINE_1}\n\n{_MISSING_NOTE_1}\n\n{MI_YES}"
ANSWER_3_2 = f"{_EXPLANATION_3_2}\n\n{TAG_LINE_2}\n\n{_MISSING_NOTE_2}\n\n{MI_YES}"
ANSWER_3_3 = f"{_EXPLANATION_3_3}\n\n{TAG_LINE_3}\n\n{_MISSING_NOTE_3}\n\n{MI_NO}"

_EXPLANATION_6_1 = """Explanation - Let's think step by step. The dialogue is about "Mary being broke and asking Carter for money.  Carter is at the train station and he will take an hour to give it to Mary". In the summary:
1. Adam is the wrong person lending the money as there is no reference of Adam in the Dialogue. It should be Carter. This is Wrong Reference (W) from the tokens described above
2. the next set of tokens [will, lend, Mary, a] are correct and hence each token is labeled (O) respectively
3. "box" is a slang for "money" but when summarizing no physical box is being lent. So a wrong object is being referenced hence (OB).
4. the punctuation '.' is ok and hence (O) for it."""

_EXPLANATION_6_2 = """Explanation - Let's think step by step. The dialogue is about "Mike took his car into garage today. Ernest is relieved as someone had just crashed into a red Honda which looks like Mike's.". In the summary:
1. The set of tokens [Mike, took, his, car, to, the, garage, today] are correct hence each token is labeled (O) respectively
2. "because" is incorrect as there is no reason and there is no corelation between him taking the car for servicing and someone elses car being hit. Its a Circumstancial Error and hence is labeled (C).
3. "it" is a wrong object reference because it refers to Mike's car which was never hit. So a Wrong Object is being referenced hence (OB).
4. the next set of tokens [had,been] are uncommon hallucination tense errors indicating Mike took his car to the garage after the accident. Hence they iare labeled (N) respectively.
5. the remaining set of tokens [hit, by, another, car .] is factually correct as someone's car was hit. Hence each token is labeled (O) respectively"""

_EXPLANATION_6_3 = """Explanation - Let's think step by step. The dialogue is about "Mark lied to Anne about his age. Mark is 40." . In the summary:
1. The set of tokens [Mark, lied, to, Anne, about, his, age, ., He's, 40, now, .] are correct hence each token is labeled (O) respectively"""

ANSWER_6_1 = f"{_EXPLANATION_6_1}\n\n{TAG_LINE_1}\n\n{_MISSING_NOTE_1}\n\n{MI_YES}"
ANSWER_6_2 = f"{_EXPLANATION_6_2}\n\n{TAG_LINE_2}\n\n{_MISSING_NOTE_2}\n\n{MI_YES}"
ANSWER_6_3 = f"{_EXPLANATION_6_3}\n\n{TAG_LINE_3}\n\n{_MISSING_NOTE_3}\n\n{MI_NO}"

ANSWER_8_1 = f"{TAG_LINE_1}\n\n{MI_YES}"
ANSWER_8_2 = f"{TAG_LINE_2}\n\n{MI_YES}"
ANSWER_8_3 = f"{TAG_LINE_3}\n\n{MI_NO}"

# ---------------------------------------------------------------------------
# Single-block tagging template (inline examples, M carried on <EOS>)
# ---------------------------------------------------------------------------

TAGGING_2_SYSTEM = """Below is a dialog between people and its summary. At the end of summary there is an extra '<EOS>' token. Your task is identify how much the summary is hallucinated. The output should be token by token classification whether its hallucinated or not. Following are the available hallucination classification labels for each token. O : Not Hallucinated, W: Wrong person reference, C: circumstancial error, OB: Object error, N: uncommon error like tense errors. At the end you have to identify if there is any missing information in the summary. For the '<EOS>', the possible labels are either 'M' if the summary has missed any information from the dialog else 'O'.  Remember to tag punctuations and not remove them.

Example 1:
Dialogue --
Jesse : I have an idea that'll cheer u up !
Melvin : What is it ?
Jesse : I was thinking about doing something 4 the less fortunate this year .
Lee : Gr8 idea ! Anything in mind ?
Maxine : So no presents 4 me ? : (
Jesse : U'll get ur presents , no worries ; )
Maxine : Phew ! Was getting a bit worried for a moment ; )
Melvin : Bt what do u have in store ?
Jesse : Well , have u heard about the Refuge ?
Lee : No . What's that ?
Melvin : That's the Christmas foundation to help women and children ?
Maxine : I think I've heard of them . So what about them ?
Jesse : That's right ! They help women and children who escape from abuse . And every year they post wish lists of such ppl online and I thought that we could choose one and chip in .
Melvin : That's a great idea !
Lee : Count me in !
Maxine : Me too .
Jesse : Have a look at these 3 lists : [FILES]
Lee : I think the second one would be the easiest to arrange .
Maxine : Agree .
Melvin : What about number 3 ? A bit ambitious , but if we pull together , we'll manage .
Jesse : Actually , I'm in for the 3rd one .
Maxine : I think the 2nd list would be better . The items cos more or less the same and we can easily divide it .
Melvin : But if we agree to chip in the same amount of money , we can deal with the 3rd one easily .
Lee : Come to think of it , the 3rd one is not that bad . A bit of planning and logistics and were good to go .
Jesse : So it's settled ?
Melvin : Yup .
Lee : Sure .
Maxine : Fine .

Summary:
Jesse , Lee and Maxine will chip in for the Refuge , a Christmas foundation for women and children who escape from abuse . <EOS>

Tags: Jesse(O) ,(O) Lee(O) and(O) Maxine(O) will(O) chip(O) in(O) for(O) the(O) Refuge(O) ,(O) a(O) Christmas(O) foundation(O) for(O) women(O) and(O) children(O) who(O) escape(O) from(O) abuse(O) .(O) <EOS>(O)

Example 2:
Dialogue --
Ernest : hey Mike , did you park your car on our street ?
Mike : no , took it into garage today
Ernest : ok good
Mike : why ?
Ernest : someone just crashed into a red honda looking just like yours
Mike : lol lucky me
Summary:
Mike's car has been damaged beyond repair after being hit by another car . <EOS>

Tags: Mike's(W) car(O) has(O) been(O) damaged(O) beyond(C) repair(C) after(O) being(O) hit(O) by(O) another(O) car(O) .(O) <EOS>(M)

Looking at the example above please look at the below dialog and its summary. Analyse if the summary is hallucinated and output tags for each token in summary."""

# Free-form baseline tagging instructions; kept for reference only, its
# answers carry no machine-parseable markers.
TAGGING_1_TEXT = """Below is a dialog between people and its summary. Your task is identify how much the summary is hallucinated. The output should be token by token classification whether its hallucinated or not. Following are the available hallucination classification labels for each token. O : Not Hallucinated, W: Wrong person reference, C: circumstancial error, OB: Object error, N: uncommon error like tense errors. At the end you have to identify if there is any missing information in the summary. If there is missing information then add an extra label M else O. Remember to tag punctuations and not remove them."""

# ---------------------------------------------------------------------------
# Summarization templates
# ---------------------------------------------------------------------------

SUMM_BASELINE_TASK = "Generate a summary of a length of exactly 10 to 15 words for the given set of dialogues."

SUMM_TAGGING_TASK = """Given a set of dialogues, the task is to generate a summary of 10-15 words by considering all the dialogues, and perform token-level classification on the summary based on whether it is hallucinated or not. Use the following tag classes to label each token of the summary.
O = Not Hallucinated,
W =  Wrong person reference,
C = Circumstantial error,
OB = Object error,
N = uncommon errors like tense errors
M = Missing information.
The tag M should only be added at the end of the sequence incase the summary is missing any information and not as a tag specific to a word in the summary."""

SUMM_TAGGING_EXAMPLE_DIALOGUE = """Hannah: Hey, do you have Betty's number?
Amanda: Lemme check
Hannah: GIF
Amanda: Sorry, can't find it.
Amanda: Ask Larry
Amanda: He called her last time we were at the park together
Hannah: I don't know him well
Hannah: GIF
Amanda: Don't be shy, he's very nice
Hannah: If you say so..
Hannah: I'd rather you texted him
Amanda: Just text him
Hannah: Urgh.. Alright
Hannah: Bye
Amanda: Bye bye"""

SUMM_TAGGING_EXAMPLE_SUMMARY = "Amanda can't find Betty's number. Larry called her last time they were at the park together. Amanda will text Larry."

SUMM_TAGGING_EXAMPLE_TAGS = "O O O O O O O O O O O O O O O O O O W O O O O"

SUMM_TAGGING_EXAMPLE_EXPLANATION = """Explanation - Let's think step by step. The dialogue is about Hannah asking for Betty's number to Amanda, who couldn't find it and suggests to ask Larry for it since he had called her(Betty) the last time they were in the park together. Hannah doesn't know him(Larry) well and is shy to text him, but Amanda asks her to do it anyway.  So according to the summary, "Amanda will text Larry" is incorrect. The way to correct this information is the token Amanda can be changed to Hannah. This is Wrong Reference (W) from the tokens described above. All other tokens are correct and are thus Not Hallucinated (O)."""

#: Worked (dialogue, summary) pairs for the one-/few-shot summarization
#: layouts. Authored for this toolkit; kept deliberately short and clean.
SUMMARIZATION_SHOTS = [
    (
        """Noah: movie night at mine on saturday?
Lena: yes! should I bring popcorn?
Noah: please, and some juice""",
        "Noah and Lena plan a movie night on Saturday with popcorn and juice.",
    ),
    (
        """Petra: the printer on floor two is jammed again
Sam: restart it, that worked last week
Petra: trying now... fixed!""",
        "Petra fixed the jammed printer on floor two after Sam suggested a restart.",
    ),
    (
        """Omar: did you send the slides to the client?
Dana: just did, five minutes ago
Omar: perfect, thanks""",
        "Dana sent the slides to the client and Omar thanked her for it.",
    ),
]

# ---------------------------------------------------------------------------
# Annotation guidelines served to the annotation UI
# ---------------------------------------------------------------------------

ANNOTATION_GUIDELINES = """# Faithfulness tagging guidelines

Label every token of the candidate summary with exactly one tag. The
end-of-summary slot carries the missing-information verdict.

1. W — Wrong Reference Error. A pronoun in the generated summary either
   refers to the wrong or non-existent noun it should be replaced, or a
   personal named entity in the summary is used incorrectly instead of a
   different personal entity mentioned in the reference.

   Example: [Reference Summary] Mohit asked Darlene about the test.
   [Model-Generated Summary] Darlene asked Mohit about the test.

2. OB — Object Error. Factual errors that arise from inaccuracies in
   either the direct or indirect objects.

   Example: [Reference Summary] Tara raised her glass.
   [Model-Generated Summary] Tara raised her spoon.

3. C — Circumstantial Error. Circumstantial information (e.g., date,
   time, location) about the predicate doesn't match the reference.

   Example: [Reference Summary] The USA was founded in 1776.
   [Model-Generated Summary] The USA was founded in 1767.

4. N — Other Uncommon Errors. Factual errors resulting from
   discrepancies in grammatical tense between the generated summary and
   the reference.

   Example: [Reference Summary] The children will go to the library.
   [Model-Generated Summary] The children went to the library.

5. O — Not Hallucinated. Tokens in the summary that are not
   hallucinated.

6. M — Missing Information. A special tag to be given at the end of
   sentence token to indicate if a summary suffers from missing
   information hallucination. Never place M on an interior token.
"""
