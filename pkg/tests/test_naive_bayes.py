"""Classifier training, percent rounding, staged/exact pipelines, persistence.

The literal expectations below were derived by hand from the 14-row weather
data before being pinned: the conditional table by counting rows per
(feature value, label), the percent table by largest-remainder rounding,
and every staged value by folding the integer pipeline by hand.
"""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from xresp import (
    Dataset,
    Entity,
    FeatureSchema,
    ModelFormatError,
    NaiveBayesModel,
    StagedOverflowError,
    classify_exact,
    classify_staged,
    load_dataset,
    load_model,
    parse_model,
    save_model,
    serialize_model,
    to_percent,
    train,
)

from oracles import all_grid_tuples

# Full conditional-probability table: (feature, value) -> (P(.|yes), P(.|no)).
EXACT_CONDITIONALS = {
    ("Outlook", "sunny"): (F(2, 9), F(3, 5)),
    ("Outlook", "overcast"): (F(4, 9), F(0, 5)),
    ("Outlook", "rain"): (F(3, 9), F(2, 5)),
    ("Temperature", "high"): (F(2, 9), F(2, 5)),
    ("Temperature", "medium"): (F(4, 9), F(2, 5)),
    ("Temperature", "low"): (F(3, 9), F(1, 5)),
    ("Humidity", "high"): (F(3, 9), F(4, 5)),
    ("Humidity", "normal"): (F(6, 9), F(1, 5)),
    ("Wind", "weak"): (F(6, 9), F(2, 5)),
    ("Wind", "strong"): (F(3, 9), F(3, 5)),
}

# Integer percent table: (feature, value) -> (percent|yes, percent|no).
PERCENT_CONDITIONALS = {
    ("Outlook", "sunny"): (22, 60),
    ("Outlook", "overcast"): (45, 0),
    ("Outlook", "rain"): (33, 40),
    ("Temperature", "high"): (22, 40),
    ("Temperature", "medium"): (45, 40),
    ("Temperature", "low"): (33, 20),
    ("Humidity", "high"): (33, 80),
    ("Humidity", "normal"): (67, 20),
    ("Wind", "weak"): (67, 40),
    ("Wind", "strong"): (33, 60),
}

# Staged numerators for every state of every recorded intervention path
# start or end: state -> (F_yes, F_no).
STAGED_TABLE = {
    ("rain", "high", "normal", "weak"): (20665, 4608),
    ("rain", "high", "high", "weak"): (10156, 18432),
    ("rain", "high", "high", "strong"): (5004, 27648),
    ("sunny", "high", "normal", "strong"): (6777, 10368),
    ("sunny", "high", "high", "weak"): (6771, 27648),
    ("rain", "medium", "high", "strong"): (10304, 27648),
    ("rain", "low", "high", "strong"): (7513, 13824),
    ("sunny", "low", "high", "weak"): (10156, 13824),
    ("sunny", "medium", "high", "weak"): (13977, 27648),
    ("sunny", "medium", "high", "strong"): (6880, 41472),
    ("sunny", "low", "high", "strong"): (5004, 20736),
}


def test_priors(weather_model):
    assert weather_model.labels == ("yes", "no")
    assert weather_model.prior["yes"] == F(9, 14)
    assert weather_model.prior["no"] == F(5, 14)


def test_full_conditional_table(weather_model):
    for (feature, value), (p_yes, p_no) in EXACT_CONDITIONALS.items():
        assert weather_model.conditional[(feature, value, "yes")] == p_yes
        assert weather_model.conditional[(feature, value, "no")] == p_no
    assert len(weather_model.conditional) == 2 * len(EXACT_CONDITIONALS)


def test_percent_table(weather_percent):
    assert weather_percent.prior == {"yes": 64, "no": 36}
    for (feature, value), (q_yes, q_no) in PERCENT_CONDITIONALS.items():
        assert weather_percent.conditional[(feature, value, "yes")] == q_yes
        assert weather_percent.conditional[(feature, value, "no")] == q_no


def test_percent_distributions_sum_to_100(weather_percent):
    assert sum(weather_percent.prior.values()) == 100
    for name, domain in weather_percent.schema.features:
        for label in weather_percent.labels:
            assert (
                sum(
                    weather_percent.conditional[(name, value, label)]
                    for value in domain
                )
                == 100
            )


def test_classify_exact_running_entity(weather_model, weather_entity):
    label, numerators = classify_exact(weather_model, weather_entity)
    assert label == "yes"
    assert numerators["yes"] == F(4, 189)
    assert numerators["no"] == F(4, 875)


def test_classify_staged_running_entity(weather_percent, weather_entity):
    label, f_yes, f_no = classify_staged(weather_percent, weather_entity)
    assert (label, f_yes, f_no) == ("yes", 20665, 4608)


def test_staged_table(weather_percent):
    for values, (f_yes, f_no) in STAGED_TABLE.items():
        label, got_yes, got_no = classify_staged(
            weather_percent, Entity("e", values)
        )
        assert (got_yes, got_no) == (f_yes, f_no), values
        assert label == ("yes" if f_yes >= f_no else "no")


def test_staged_and_exact_agree_on_whole_grid(weather_model, weather_percent):
    for values in all_grid_tuples(weather_model.schema):
        entity = Entity("e", values)
        exact_label, _ = classify_exact(weather_model, entity)
        staged_label, _, _ = classify_staged(weather_percent, entity)
        assert exact_label == staged_label, values


def test_tie_goes_to_positive_label(tmp_path):
    # both labels are equally likely and x is equally likely under each,
    # so the numerators tie exactly; the positive label must win
    path = tmp_path / "tie.csv"
    path.write_text(
        "A,label\nx,yes\nx,no\ny,yes\ny,no\n",
        encoding="utf-8",
    )
    dataset = load_dataset(str(path))

    model = train(dataset, positive_label="yes")
    label, numerators = classify_exact(model, Entity("e", ("x",)))
    assert numerators["yes"] == numerators["no"]
    assert label == "yes"
    staged_label, f_pos, f_neg = classify_staged(to_percent(model), Entity("e", ("x",)))
    assert f_pos == f_neg
    assert staged_label == "yes"

    flipped = train(dataset, positive_label="no")
    label2, _ = classify_exact(flipped, Entity("e", ("x",)))
    assert label2 == "no"


def test_positive_label_defaults_to_majority(weather_dataset):
    assert train(weather_dataset).labels == ("yes", "no")
    forced = train(weather_dataset, positive_label="no")
    assert forced.labels == ("no", "yes")
    with pytest.raises(ModelFormatError):
        train(weather_dataset, positive_label="maybe")


def test_staged_overflow_guard(weather_percent, weather_entity):
    with pytest.raises(StagedOverflowError):
        classify_staged(weather_percent, weather_entity, 1000)
    # large enough ceiling never triggers
    classify_staged(weather_percent, weather_entity, 10**8)


def test_persistence_round_trip(weather_model, tmp_path):
    path = tmp_path / "model.txt"
    save_model(weather_model, str(path), class_column="Play")
    again, class_column = load_model(str(path))
    assert again == weather_model
    assert class_column == "Play"


def test_serialize_model_format(weather_model):
    text = serialize_model(weather_model, "Play")
    lines = text.splitlines()
    assert lines[0] == "labels: yes,no"
    assert lines[1] == "class-column: Play"
    assert "prior: yes 9/14" in lines
    assert "prior: no 5/14" in lines
    assert "Humidity,normal,yes,2/3" in lines


def test_parse_model_errors():
    with pytest.raises(ModelFormatError):
        parse_model("")  # no labels header
    with pytest.raises(ModelFormatError):
        parse_model("labels: yes,no\nprior: yes 1/2\nprior: no 1/2\nbogus\n")
    with pytest.raises(ModelFormatError):
        parse_model(
            "labels: yes,no\n"
            "prior: yes 1/2\n"
            "prior: no 1/2\n"
            "A,x,yes,1/2\n"  # incomplete conditional table
        )


def test_model_distribution_validation(weather_model):
    broken_prior = dict(weather_model.prior)
    broken_prior["yes"] = F(1, 2)
    with pytest.raises(ModelFormatError):
        NaiveBayesModel(
            schema=weather_model.schema,
            labels=weather_model.labels,
            prior=broken_prior,
            conditional=dict(weather_model.conditional),
        )


@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_percent_tables_always_sum_to_100(data):
    domain_a = ("x", "y", "z")
    domain_b = ("u", "v")
    schema = FeatureSchema(features=(("A", domain_a), ("B", domain_b)))
    n_rows = data.draw(st.integers(min_value=4, max_value=12))
    rows = tuple(
        (
            (
                data.draw(st.sampled_from(domain_a)),
                data.draw(st.sampled_from(domain_b)),
            ),
            "yes" if i % 2 == 0 else "no",
        )
        for i in range(n_rows)
    )
    dataset = Dataset(
        schema=schema, rows=rows, labels=("yes", "no"), class_column="label"
    )
    percent = to_percent(train(dataset))
    assert sum(percent.prior.values()) == 100
    for name, domain in percent.schema.features:
        for label in percent.labels:
            assert (
                sum(percent.conditional[(name, value, label)] for value in domain)
                == 100
            )
