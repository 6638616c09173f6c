"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as
they go by; plain ``pytest`` shows them in the captured-output section.
"""

import random
import threading
import time

import torch
from fastapi.testclient import TestClient

import conftest
import oracles
from faithtag import prompt_texts as texts
from faithtag.corpus import load_dataset, split_by_dialogue
from faithtag.joint import (
    JointSummarizerTagger,
    JointTrainConfig,
    joint_loss,
    shift_tag_id,
    shift_tags,
    special_token_mask,
    unshift_tag_id,
)
from faithtag.metrics import binary_prf, tag_prf
from faithtag.nets import Seq2SeqDualHead
from faithtag.prompting import parse_tagger_output
from faithtag.proxy import ProxyTagger, ProxyTrainConfig
from faithtag.rouge import rouge_l, rouge_lsum, rouge_n, split_sentences
from faithtag.service import TaskStore, create_app
from faithtag.synthetic import make_synthetic_dataset
from faithtag.tags import FINAL_CODES, INTERIOR_CODES, TAG_CODES, binarize_tags

WORDS = ["red", "blue", "green", "dog", "cat", "runs", "sits", "fast", "very", "the", "a", "now"]


def _ok(name: str, detail: str = "") -> None:
    suffix = f"  [{detail}]" if detail else ""
    print(f"PASS {name}{suffix}")


# ---------------------------------------------------------------------------
# 1. ROUGE oracle equivalence
# ---------------------------------------------------------------------------

def test_rouge_oracle_equivalence():
    rng = random.Random(2024)
    start = time.perf_counter()
    for _ in range(200):
        cand = [rng.choice(WORDS) for _ in range(rng.randint(0, 20))]
        ref = [rng.choice(WORDS) for _ in range(rng.randint(0, 20))]
        for n in (1, 2):
            got = rouge_n(cand, ref, n)
            want = oracles.naive_rouge_n(cand, ref, n)
            assert abs(got.precision - want[0]) < 1e-9
            assert abs(got.recall - want[1]) < 1e-9
            assert abs(got.fmeasure - want[2]) < 1e-9
        got = rouge_l(cand, ref)
        want = oracles.naive_rouge_l(cand, ref)
        assert abs(got.precision - want[0]) < 1e-9
        assert abs(got.recall - want[1]) < 1e-9

        def text(tokens):
            out = []
            for i, tok in enumerate(tokens):
                out.append(tok)
                if i % 5 == 4:
                    out.append(rng.choice([".", "?", "!"]))
            return " ".join(out)

        cand_text, ref_text = text(cand), text(ref)
        got = rouge_lsum(cand_text, ref_text)
        want = oracles.naive_union_lcs(
            split_sentences(cand_text), split_sentences(ref_text)
        )
        assert abs(got.precision - want[0]) < 1e-9
        assert abs(got.recall - want[1]) < 1e-9
        assert abs(got.fmeasure - want[2]) < 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _ok("rouge-oracle-equivalence", f"200 pairs in {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 2. Span-metric oracle equivalence
# ---------------------------------------------------------------------------

def test_span_metric_oracle_equivalence():
    rng = random.Random(77)
    start = time.perf_counter()
    gold_tag, pred_tag, gold_bin, pred_bin = [], [], [], []
    for _ in range(1000):
        n = rng.randint(1, 40)
        gold_tag.append([rng.choice(TAG_CODES) for _ in range(n)])
        pred_tag.append([rng.choice(TAG_CODES) for _ in range(n)])
        gold_bin.append([rng.randint(0, 1) for _ in range(n)])
        pred_bin.append([rng.randint(0, 1) for _ in range(n)])

    report = tag_prf(gold_tag, pred_tag)
    want = oracles.naive_prf(gold_tag, pred_tag, "O")
    assert (report.precision, report.recall, report.f1, report.accuracy) == want
    assert report.confusion == oracles.naive_confusion(gold_tag, pred_tag, report.labels)
    for label in ("W", "OB", "C", "N", "M"):
        score = report.per_label[label]
        lp, lr, lf, ls = oracles.naive_per_label(gold_tag, pred_tag, label, "O")
        assert (score.precision, score.recall, score.f1, score.support) == (lp, lr, lf, ls)

    binary = binary_prf(gold_bin, pred_bin)
    want_bin = oracles.naive_prf(gold_bin, pred_bin, 0)
    assert (binary.precision, binary.recall, binary.f1, binary.accuracy) == want_bin

    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _ok("span-metric-oracle-equivalence", f"1000 pairs in {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 3. Binarization consistency
# ---------------------------------------------------------------------------

def test_binarization_consistency():
    rng = random.Random(5)
    gold, pred = [], []
    for _ in range(200):
        n = rng.randint(1, 30)
        gold.append([rng.choice(TAG_CODES) for _ in range(n)])
        pred.append([rng.choice(TAG_CODES) for _ in range(n)])
    binarize_then_score = binary_prf(
        [binarize_tags(g) for g in gold], [binarize_tags(p) for p in pred]
    )
    pre_binarized = [[0 if t == "O" else 1 for t in p] for p in pred]
    score_pre_binarized = binary_prf([binarize_tags(g) for g in gold], pre_binarized)
    assert binarize_then_score == score_pre_binarized
    _ok("binarization-consistency")


# ---------------------------------------------------------------------------
# 4. Parser golden tests
# ---------------------------------------------------------------------------

def test_parser_golden_appendix_answers():
    answer1_tags = ["W", "O", "O", "O", "O", "OB", "O"]
    answer2_tags = ["O"] * 8 + ["C", "OB", "N", "N"] + ["O"] * 5
    answer3_tags = ["O"] * 12
    table = [
        (texts.ANSWER_3_1, 7, answer1_tags, "yes"),
        (texts.ANSWER_6_1, 7, answer1_tags, "yes"),
        (texts.ANSWER_8_1, 7, answer1_tags, "yes"),
        (texts.ANSWER_9_1, 7, answer1_tags, "yes"),
        (texts.ANSWER_3_2, 17, answer2_tags, "yes"),
        (texts.ANSWER_6_2, 17, answer2_tags, "yes"),
        (texts.ANSWER_8_2, 17, answer2_tags, "yes"),
        (texts.ANSWER_9_2, 17, answer2_tags, "yes"),
        (texts.ANSWER_3_3, 12, answer3_tags, "no"),
        (texts.ANSWER_6_3, 12, answer3_tags, "no"),
        (texts.ANSWER_8_3, 12, answer3_tags, "no"),
        (texts.ANSWER_9_3, 12, answer3_tags, "no"),
    ]
    for text, expected_count, tags, mi in table:
        parsed = parse_tagger_output(text, expected_count)
        assert parsed.valid, parsed.failure_reason
        assert parsed.tags == tags
        assert parsed.missing_info == mi
    assert "Adam(W) will(O) lend(O) Mary(O) a(O) box(OB) .(O)" in texts.ANSWER_9_1
    _ok("parser-golden-tests", "12 worked answers")


# ---------------------------------------------------------------------------
# 5. Gradient check
# ---------------------------------------------------------------------------

def test_gradient_check_tiny_model():
    start = time.perf_counter()
    torch.manual_seed(0)
    model = Seq2SeqDualHead(
        vocab_size=30, d_model=8, heads=2, enc_layers=1, dec_layers=1,
        max_len=16, dropout=0.0,
    ).double()
    model.train()

    src = torch.tensor([[4, 9, 12, 25, 7, 5]])
    tgt_in = torch.tensor([[0, 6, 14, 20, 8]])   # seq len 5
    tgt_out = torch.tensor([[6, 14, 20, 8, 2]])
    tags = torch.tensor([[4, 3, 7, 8, 3]])
    mask = special_token_mask(tgt_out)

    def compute_loss():
        _, token_logits, tag_logits = model(src, tgt_in)
        return joint_loss(token_logits, tag_logits, tgt_out, tags, mask, 1.0)

    compute_loss().backward()

    step = 1e-5
    worst = 0.0
    checked = 0
    for p in model.parameters():
        flat = p.data.view(-1)
        grad = p.grad.view(-1)
        for i in range(flat.numel()):
            original = flat[i].item()
            flat[i] = original + step
            up = compute_loss().item()
            flat[i] = original - step
            down = compute_loss().item()
            flat[i] = original
            fd = (up - down) / (2 * step)
            analytic = grad[i].item()
            rel = abs(analytic - fd) / max(abs(analytic), abs(fd), 1e-6)
            worst = max(worst, rel)
            checked += 1
    elapsed = time.perf_counter() - start
    assert worst < 1e-4, f"worst relative error {worst:.3e}"
    assert elapsed < 60.0
    _ok("gradient-check", f"{checked} params, worst rel err {worst:.2e}, {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 6. Masking invariance
# ---------------------------------------------------------------------------

def test_masking_invariance_100_cases():
    rng = random.Random(314)
    for _ in range(100):
        positions, vocab = rng.randint(3, 12), 18
        token_logits = torch.tensor(
            [[rng.uniform(-3, 3) for _ in range(vocab)] for _ in range(positions)],
            dtype=torch.float64,
        )
        tag_logits = torch.tensor(
            [[rng.uniform(-3, 3) for _ in range(9)] for _ in range(positions)],
            dtype=torch.float64,
        )
        ids = [rng.randint(4, vocab - 1) for _ in range(positions - 2)]
        target_tokens = torch.tensor(ids + [2, 1])  # EOS_ID then PAD
        target_tags = torch.tensor([rng.randint(3, 8) for _ in range(positions)])
        mask = special_token_mask(target_tokens)
        base = joint_loss(token_logits, tag_logits, target_tokens, target_tags, mask, 1.0).item()
        perturbed = tag_logits.clone()
        for i in range(positions):
            if not bool(mask[i]):
                perturbed[i] += rng.uniform(-1000, 1000)
        after = joint_loss(token_logits, perturbed, target_tokens, target_tags, mask, 1.0).item()
        assert after == base
    _ok("masking-invariance", "100 cases, exact zero change")


# ---------------------------------------------------------------------------
# 7. Shift bijection
# ---------------------------------------------------------------------------

def test_shift_bijection():
    assert shift_tags(list(range(6))) == [3, 4, 5, 6, 7, 8]
    for base in range(6):
        assert unshift_tag_id(shift_tag_id(base)) == base
    assert sorted(shift_tags(list(range(6)))) == list(range(3, 9))
    _ok("shift-bijection", "0-5 <-> 3-8")


# ---------------------------------------------------------------------------
# 8. Dual-generate contract
# ---------------------------------------------------------------------------

def test_dual_generate_contract_100_decodes():
    ds = make_synthetic_dataset(5, seed=9)
    dialogues = [ex.dialogue for ex in ds.examples]
    decodes = 0
    for seed in range(20):
        config = JointTrainConfig(
            seed=seed, d_model=32, heads=2, enc_layers=1, dec_layers=1, max_len=64
        )
        est = JointSummarizerTagger(config).initialize(ds)
        for dialogue in dialogues:
            tokens, tags = est.generate_with_tags(dialogue, max_len=10)
            decodes += 1
            assert len(tokens) == len(tags)
            for tag in tags[:-1]:
                assert tag in INTERIOR_CODES
            if tags:
                assert tags[-1] in FINAL_CODES
    assert decodes == 100
    _ok("dual-generate-contract", "100 random-init decodes")


# ---------------------------------------------------------------------------
# 9. Toy convergence
# ---------------------------------------------------------------------------

def test_toy_convergence_proxy(synthetic_splits, trained_proxy):
    test_split = synthetic_splits["test"]
    correct = total = 0
    for ex, pred in zip(test_split.examples, trained_proxy.predict(test_split)):
        for g, p in zip(ex.summary.tags, pred):
            correct += g == p
            total += 1
    accuracy = correct / total
    assert accuracy >= 0.95, f"held-out token tag accuracy {accuracy:.4f}"
    params = trained_proxy.get_params()
    assert params["learning_rate"] == 2e-5 and params["epochs"] == 10
    _ok("toy-convergence-proxy", f"held-out acc {accuracy:.4f}")


def test_toy_convergence_joint_phase2(trained_joint_phase2):
    epochs = trained_joint_phase2.epoch_losses_["phase2"]
    assert len(epochs) == 15
    reduction = 1 - epochs[-1] / epochs[0]
    assert reduction >= 0.5, f"joint loss only fell {reduction:.1%}"
    params = trained_joint_phase2.get_params()
    assert params["epochs"] == 15 and params["seed"] == 42
    _ok("toy-convergence-joint", f"loss {epochs[0]:.3f}->{epochs[-1]:.3f} ({reduction:.1%})")


def test_toy_convergence_runtime_budget(trained_proxy, trained_joint_phase2):
    total = sum(conftest.TRAINING_SECONDS.values())
    assert conftest.TRAINING_SECONDS, "training fixtures did not record timings"
    assert total < 600.0, f"training took {total:.0f}s"
    _ok("toy-convergence-runtime", f"{total:.0f}s total training")


# ---------------------------------------------------------------------------
# 10. Overfit fidelity
# ---------------------------------------------------------------------------

def test_overfit_fidelity_both_models():
    ds = make_synthetic_dataset(6, seed=0)
    example = ds.examples[5]  # M-corrupted: short summary, M on [EOS]

    proxy = ProxyTagger(
        ProxyTrainConfig(learning_rate=5e-3, epochs=60, seed=42,
                         d_model=32, heads=2, enc_layers=1, max_len=128)
    ).fit([example])
    assert proxy.predict_example(example) == example.summary.tags

    joint = JointSummarizerTagger(
        JointTrainConfig(learning_rate=2e-3, train_batch=1, epochs=60, seed=42,
                         d_model=64, heads=4, enc_layers=1, dec_layers=1, max_len=128)
    ).fit_phase2([example])
    tokens, tags = joint.generate_with_tags(example.dialogue, max_len=40)
    assert tokens == example.summary.tokens
    assert tags == example.summary.tags
    _ok("overfit-fidelity", "proxy tags + joint tokens and tags exact")


# ---------------------------------------------------------------------------
# 11. Split discipline
# ---------------------------------------------------------------------------

def test_split_discipline_50_random_datasets():
    rng = random.Random(606)
    for trial in range(50):
        dataset = conftest.build_random_dataset(rng, n_dialogues=rng.randint(1, 60))
        assigned = split_by_dialogue(dataset, (76, 12, 12), seed=trial)
        per_dialogue: dict[str, set] = {}
        for ex in assigned.examples:
            split = assigned.split_assignment[ex.dialogue.id]
            per_dialogue.setdefault(ex.dialogue.id, set()).add(split)
        assert all(len(s) == 1 for s in per_dialogue.values())
        n = len(assigned.dialogue_ids())
        from collections import Counter

        counts = Counter(assigned.split_assignment.values())
        for name, pct in zip(("train", "validation", "test"), (76, 12, 12)):
            assert abs(counts.get(name, 0) - n * pct / 100) <= 1
    _ok("split-discipline", "50 random datasets")


# ---------------------------------------------------------------------------
# 12. Service round-trip
# ---------------------------------------------------------------------------

def test_service_round_trip_and_conflict(tmp_path):
    store = TaskStore(tmp_path / "journal.jsonl")
    store.add_dataset(make_synthetic_dataset(3, seed=21))
    client = TestClient(create_app(store))

    submitted = {}
    for annotator in ("ann", "bob", "cal"):
        task = client.get("/api/tasks/next", params={"annotator": annotator}).json()
        n = len(task["summary_tokens"])
        tags = ["W"] + ["O"] * (n - 2) + ["M"]
        response = client.post(
            f"/api/tasks/{task['task_id']}/tags",
            json={"tags": tags, "revision": task["revision"]},
        )
        assert response.status_code == 200
        submitted[task["dialogue_id"]] = tags

    export_path = tmp_path / "export.jsonl"
    export_path.write_text(client.get("/api/export").text, encoding="utf-8")
    dataset = load_dataset(export_path)
    assert len(dataset) == 3
    for ex in dataset.examples:
        assert ex.summary.tags == submitted[ex.dialogue.id]

    # Concurrent conflicting submissions: exactly one winner, one 409.
    conflict_store = TaskStore()
    conflict_store.add_dataset(make_synthetic_dataset(1, seed=3))
    conflict_client = TestClient(create_app(conflict_store))
    task = conflict_client.get("/api/tasks/next", params={"annotator": "x"}).json()
    n = len(task["summary_tokens"])
    codes = []
    barrier = threading.Barrier(2)

    def post():
        barrier.wait()
        response = conflict_client.post(
            f"/api/tasks/{task['task_id']}/tags",
            json={"tags": ["O"] * n, "revision": task["revision"]},
        )
        codes.append(response.status_code)

    threads = [threading.Thread(target=post) for _ in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(codes) == [200, 409]
    _ok("service-round-trip", "export lossless; conflict gave one 200 and one 409")
