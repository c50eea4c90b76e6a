"""Hand-labeled 30-sentence corpus with a small rule set.

Label tallies: 6 APA t-tests, 3 APA correlations, 4 APA F-tests without an
r-value, 2 non-conforming t-tests, 8 rejected (table/figure references),
7 unmatched.  APA share over the 15 statistics: 13/15 with the no-r F-tests,
9/15 without them.
"""

from rexincl.extractor import Document, REJECTED, STATISTIC, UNMATCHED
from rexincl.frontend import RawPattern
from rexincl.reducer import Rule

APA_SHARE_WITH = 100.0 * 13 / 15
APA_SHARE_WITHOUT = 100.0 * 9 / 15

RULES = [
    Rule(
        id=0,
        pattern=RawPattern(r"t\(\d+\)\s?=\s?-?\d+\.\d+,\s?p\s?[<>=]\s?\.\d+"),
        polarity="positive",
        statistic_type="t-test",
        apa=True,
        subrules=(
            ("df", RawPattern(r"\((\d+)\)")),
            ("statistic", RawPattern(r"=\s?(-?\d+\.\d+)")),
            ("p_value", RawPattern(r"p\s?[<>=]\s?(\.\d+)")),
        ),
    ),
    Rule(
        id=1,
        pattern=RawPattern(r"r\s?=\s?-?\.\d+,\s?p\s?[<>=]\s?\.\d+"),
        polarity="positive",
        statistic_type="pearson",
        apa=True,
        subrules=(("statistic", RawPattern(r"r\s?=\s?(-?\.\d+)")),),
    ),
    Rule(
        id=2,
        pattern=RawPattern(r"F\(\d+,\s?\d+\)\s?=\s?\d+\.\d+"),
        polarity="positive",
        statistic_type="anova-no-r",
        apa=True,
        subrules=(("statistic", RawPattern(r"=\s?(\d+\.\d+)")),),
    ),
    Rule(
        id=3,
        pattern=RawPattern(r"t-value of \d+\.\d+"),
        polarity="positive",
        statistic_type="t-test",
        apa=False,
    ),
    Rule(id=10, pattern=RawPattern(r"[Tt]able \d{1,2}"), polarity="negative"),
    Rule(id=11, pattern=RawPattern(r"[Ff]igure \d{1,2}"), polarity="negative"),
]

# (sentence text, expected outcome, expected statistic type)
LABELED = [
    ("The first test gave t(12) = 2.31, p < .05.", STATISTIC, "t-test"),
    ("Group B differed, t(44) = -3.02, p < .01.", STATISTIC, "t-test"),
    ("Scores rose, t(8) = 2.90, p = .02.", STATISTIC, "t-test"),
    ("The replication found t(30) = 1.99, p > .05.", STATISTIC, "t-test"),
    ("Accuracy improved, t(61) = 4.10, p < .001.", STATISTIC, "t-test"),
    ("Latency fell, t(19) = -2.15, p < .05.", STATISTIC, "t-test"),
    ("Age correlated with score, r = .42, p < .01.", STATISTIC, "pearson"),
    ("Income tracked education, r = -.38, p < .05.", STATISTIC, "pearson"),
    ("Recall related to span, r = .61, p < .001.", STATISTIC, "pearson"),
    ("The main effect held, F(2, 40) = 3.52.", STATISTIC, "anova-no-r"),
    ("Condition mattered, F(1, 58) = 7.04.", STATISTIC, "anova-no-r"),
    ("The interaction emerged, F(3, 96) = 2.80.", STATISTIC, "anova-no-r"),
    ("Order had no effect, F(2, 38) = 1.10.", STATISTIC, "anova-no-r"),
    ("The pilot reported a t-value of 2.40 without degrees of freedom.", STATISTIC, "t-test"),
    ("A second pilot reported a t-value of 3.15 only.", STATISTIC, "t-test"),
    ("Table 1 lists all 60 conditions.", REJECTED, None),
    ("Table 2 summarizes the 12 groups.", REJECTED, None),
    ("See table 3 for the 4 baselines.", REJECTED, None),
    ("Table 4 holds the 16 cell means.", REJECTED, None),
    ("Figure 1 plots all 60 trials.", REJECTED, None),
    ("Figure 2 shows the 8 outliers.", REJECTED, None),
    ("See figure 3 for the 5 clusters.", REJECTED, None),
    ("Figure 10 displays the 2 conditions.", REJECTED, None),
    ("We recruited 48 participants in total.", UNMATCHED, None),
    ("Each session lasted 45 minutes.", UNMATCHED, None),
    ("Stimuli appeared for 250 ms.", UNMATCHED, None),
    ("The survey had 20 items.", UNMATCHED, None),
    ("Data collection ran for 6 weeks.", UNMATCHED, None),
    ("Participants earned 10 euros.", UNMATCHED, None),
    ("The panel included 3 raters.", UNMATCHED, None),
]

EXPECTED_COUNTS = {STATISTIC: 15, REJECTED: 8, UNMATCHED: 7}


def build_corpus(per_doc=6):
    """The labeled sentences packed into documents, `per_doc` at a time."""
    docs = []
    for d, start in enumerate(range(0, len(LABELED), per_doc)):
        text = " ".join(t for t, _, _ in LABELED[start:start + per_doc])
        docs.append(Document(doc_id=f"paper{d}", text=text))
    return docs
