"""Victim model gradients, input attacks, and detection metrics."""

import numpy as np
import pytest

from drivebench.attacks import (
    AttackConfig,
    DetectionBox,
    TinyMLP,
    ap_at_05,
    asr,
    cw,
    fgsm,
    iou,
    margin_value,
    pgd,
    synthetic_patch_dataset,
    train_tiny_victim,
)


@pytest.fixture(scope="module")
def victim_setup():
    inputs, labels = synthetic_patch_dataset(2300, seed=0)
    model = train_tiny_victim(inputs[:2000], labels[:2000], seed=0)
    return model, inputs[2000:], labels[2000:]


def cross_entropy_from_logits(logits, label):
    shifted = logits - logits.max()
    return float(np.log(np.sum(np.exp(shifted))) - shifted[label])


def margin_from_logits(logits, label):
    others = np.delete(logits, label)
    return float(logits[label] - others.max())


class LinearVictim:
    """Two-class model with logits [0, w.x]; closed-form gradients."""

    def __init__(self, w):
        self.w = np.asarray(w, dtype=float)

    def forward(self, x):
        return np.array([0.0, float(self.w @ x)])

    def input_gradient(self, x, label, loss="cross-entropy"):
        p1 = 1.0 / (1.0 + np.exp(-float(self.w @ x)))
        return (p1 - (1.0 if label == 1 else 0.0)) * self.w


class BrokenVictim:
    def forward(self, x):
        return np.array([0.0, 1.0])

    def input_gradient(self, x, label, loss="cross-entropy"):
        return np.full(np.shape(x), np.nan)


class TestTinyMLP:
    def test_forward_shapes_and_batch_consistency(self):
        model = TinyMLP.init(6, 3, seed=1)
        batch = np.random.default_rng(0).random((4, 6))
        out = model.forward(batch)
        assert out.shape == (4, 3)
        single = model.forward(batch[2])
        assert single.shape == (3,)
        assert np.allclose(single, out[2])

    def test_cross_entropy_gradient_matches_finite_differences(self):
        model = TinyMLP.init(10, 3, seed=2)
        rng = np.random.default_rng(3)
        h = 1e-5
        for probe in range(5):
            x = rng.random(10)
            label = int(rng.integers(0, 3))
            grad = model.input_gradient(x, label, "cross-entropy")
            fd = np.zeros_like(x)
            for i in range(10):
                up, down = x.copy(), x.copy()
                up[i] += h
                down[i] -= h
                fd[i] = (
                    cross_entropy_from_logits(model.forward(up), label)
                    - cross_entropy_from_logits(model.forward(down), label)
                ) / (2 * h)
            rel = np.linalg.norm(fd - grad) / max(np.linalg.norm(grad), 1e-12)
            assert rel <= 1e-4, (probe, rel)

    def test_margin_gradient_matches_finite_differences(self):
        model = TinyMLP.init(8, 4, seed=4)
        rng = np.random.default_rng(5)
        h = 1e-5
        for _ in range(5):
            x = rng.random(8)
            label = int(rng.integers(0, 4))
            grad = model.input_gradient(x, label, "margin")
            fd = np.zeros_like(x)
            for i in range(8):
                up, down = x.copy(), x.copy()
                up[i] += h
                down[i] -= h
                fd[i] = (
                    margin_from_logits(model.forward(up), label)
                    - margin_from_logits(model.forward(down), label)
                ) / (2 * h)
            rel = np.linalg.norm(fd - grad) / max(np.linalg.norm(grad), 1e-12)
            assert rel <= 1e-4

    def test_margin_value_agrees_with_logits(self):
        model = TinyMLP.init(5, 3, seed=6)
        x = np.random.default_rng(7).random(5)
        assert margin_value(model, x, 1) == pytest.approx(
            margin_from_logits(model.forward(x), 1)
        )

    def test_input_gradient_validation(self):
        model = TinyMLP.init(4, 2, seed=0)
        x = np.zeros(4)
        with pytest.raises(ValueError):
            model.input_gradient(x, 0, "hinge")
        with pytest.raises(ValueError):
            model.input_gradient(x, 5)
        with pytest.raises(ValueError):
            model.input_gradient(np.zeros((2, 4)), 0)

    def test_zero_epochs_returns_initialization(self):
        inputs, labels = synthetic_patch_dataset(64, seed=1)
        trained = train_tiny_victim(inputs, labels, epochs=0, seed=9)
        reference = TinyMLP.init(inputs.shape[1], 2, seed=9)
        for a, b in zip(trained.weights, reference.weights):
            assert np.array_equal(a, b)
        for a, b in zip(trained.biases, reference.biases):
            assert np.array_equal(a, b)

    def test_training_is_seed_reproducible(self):
        inputs, labels = synthetic_patch_dataset(300, seed=2)
        a = train_tiny_victim(inputs, labels, epochs=3, seed=5)
        b = train_tiny_victim(inputs, labels, epochs=3, seed=5)
        c = train_tiny_victim(inputs, labels, epochs=3, seed=6)
        for wa, wb in zip(a.weights, b.weights):
            assert np.array_equal(wa, wb)
        assert any(
            not np.array_equal(wa, wc) for wa, wc in zip(a.weights, c.weights)
        )

    def test_linearly_separable_blobs(self):
        rng = np.random.default_rng(11)
        half = 200
        blob_a = rng.normal((0.2, 0.2), 0.05, (half, 2))
        blob_b = rng.normal((0.8, 0.8), 0.05, (half, 2))
        inputs = np.vstack([blob_a, blob_b])
        labels = np.array([0] * half + [1] * half)
        model = train_tiny_victim(inputs, labels, epochs=30, seed=0)
        assert model.accuracy(inputs, labels) >= 0.99

    def test_victim_clean_accuracy(self, victim_setup):
        model, inputs, labels = victim_setup
        assert model.accuracy(inputs, labels) >= 0.9

    def test_dataset_values_and_balance(self):
        inputs, labels = synthetic_patch_dataset(2000, seed=3)
        assert inputs.shape == (2000, 64)
        assert inputs.min() >= 0.0 and inputs.max() <= 1.0
        assert 0.4 < labels.mean() < 0.6

    def test_training_input_validation(self):
        with pytest.raises(ValueError):
            train_tiny_victim(np.zeros((4, 2)), np.zeros(3, dtype=int))
        with pytest.raises(ValueError):
            train_tiny_victim(np.zeros((4, 2)), np.zeros(4, dtype=int), epochs=-1)


class TestGradientAttacks:
    def test_fgsm_matches_linear_closed_form(self):
        w = np.array([0.8, -1.2, 2.0, -0.3])
        model = LinearVictim(w)
        x = np.full(4, 0.5)
        eps = 0.1
        # true label 0: ascent raises the class-1 logit, so the step
        # moves each component along sign(w)
        out = fgsm(model, x, 0, eps)
        assert np.array_equal(out, np.clip(x + eps * np.sign(w), 0.0, 1.0))
        # true label 1: opposite direction
        out = fgsm(model, x, 1, eps)
        assert np.array_equal(out, np.clip(x - eps * np.sign(w), 0.0, 1.0))

    def test_zero_epsilon_is_identity(self, victim_setup):
        model, inputs, labels = victim_setup
        x, label = inputs[0], int(labels[0])
        cfg = AttackConfig(epsilon=0.0)
        for out in (
            fgsm(model, x, label, 0.0),
            pgd(model, x, label, cfg),
            cw(model, x, label, cfg),
        ):
            assert np.array_equal(out, x)
            assert out is not x

    def test_pgd_single_full_step_equals_fgsm(self, victim_setup):
        model, inputs, labels = victim_setup
        eps = 8.0 / 255.0
        cfg = AttackConfig(epsilon=eps, steps=1, step_size=eps, random_start=False)
        for i in range(20):
            a = fgsm(model, inputs[i], int(labels[i]), eps)
            b = pgd(model, inputs[i], int(labels[i]), cfg)
            assert np.array_equal(a, b), i

    def test_pgd_random_start_is_rng_deterministic(self, victim_setup):
        model, inputs, labels = victim_setup
        cfg = AttackConfig(epsilon=8.0 / 255.0, steps=3, random_start=True)
        x, label = inputs[1], int(labels[1])
        a = pgd(model, x, label, cfg, rng=np.random.default_rng(7))
        b = pgd(model, x, label, cfg, rng=np.random.default_rng(7))
        c = pgd(model, x, label, cfg, rng=np.random.default_rng(8))
        default = pgd(model, x, label, cfg)
        seed_zero = pgd(model, x, label, cfg, rng=np.random.default_rng(0))
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert np.array_equal(default, seed_zero)

    def test_outputs_respect_ball_and_box(self, victim_setup):
        model, inputs, labels = victim_setup
        eps = 8.0 / 255.0
        cfg = AttackConfig(epsilon=eps, steps=10, random_start=True, cw_binary_search_steps=4)
        rng = np.random.default_rng(0)
        samples = list(range(10)) + [None, None]
        for pick in samples:
            if pick is None:
                # boundary inputs exercise the unit-box clamp
                x = np.zeros(64) if rng.random() < 0.5 else np.ones(64)
                label = 0
            else:
                x, label = inputs[pick], int(labels[pick])
            for out in (
                fgsm(model, x, label, eps),
                pgd(model, x, label, cfg, rng=rng),
                cw(model, x, label, cfg),
            ):
                assert np.abs(out - x).max() <= eps + 1e-9
                assert out.min() >= 0.0 and out.max() <= 1.0

    def test_non_finite_gradient_raises(self):
        model = BrokenVictim()
        x = np.full(3, 0.5)
        cfg = AttackConfig(epsilon=0.1, steps=2)
        # label 1 is the argmax, so every attack must consult the gradient
        with pytest.raises(ValueError):
            fgsm(model, x, 1, 0.1)
        with pytest.raises(ValueError):
            pgd(model, x, 1, cfg)
        with pytest.raises(ValueError):
            cw(model, x, 1, cfg)

    def test_cw_success_drives_margin_negative(self, victim_setup):
        model, inputs, labels = victim_setup
        cfg = AttackConfig(epsilon=8.0 / 255.0, steps=10, cw_margin=0.0)
        flipped = 0
        for i in range(40):
            x, label = inputs[i], int(labels[i])
            if int(np.argmax(model.forward(x))) != label:
                continue
            out = cw(model, x, label, cfg)
            if int(np.argmax(model.forward(out))) != label:
                flipped += 1
                assert margin_value(model, out, label) <= 0.0
        assert flipped > 0

    def test_cw_binary_search_shrinks_radius_and_keeps_success(self, victim_setup):
        model, inputs, labels = victim_setup
        eps = 8.0 / 255.0
        plain = AttackConfig(epsilon=eps, steps=10)
        refined = AttackConfig(epsilon=eps, steps=10, cw_binary_search_steps=6)
        checked = 0
        for i in range(30):
            x, label = inputs[i], int(labels[i])
            full = cw(model, x, label, plain)
            if int(np.argmax(model.forward(full))) == label:
                continue
            small = cw(model, x, label, refined)
            assert int(np.argmax(model.forward(small))) != label
            assert np.abs(small - x).max() <= np.abs(full - x).max() + 1e-12
            checked += 1
        assert checked > 0

    def test_attack_strength_ordering(self, victim_setup):
        model, inputs, labels = victim_setup
        eps = 8.0 / 255.0
        cfg = AttackConfig(epsilon=eps, steps=10, step_size=2.0 / 255.0)
        n = len(inputs)
        clean = model.accuracy(inputs, labels)

        def attacked_accuracy(attack):
            hits = 0
            for i in range(n):
                out = attack(inputs[i], int(labels[i]))
                hits += int(np.argmax(model.forward(out)) == labels[i])
            return hits / n

        fgsm_acc = attacked_accuracy(lambda x, y: fgsm(model, x, y, eps))
        pgd_acc = attacked_accuracy(lambda x, y: pgd(model, x, y, cfg))
        cw_acc = attacked_accuracy(lambda x, y: cw(model, x, y, cfg))
        assert fgsm_acc < clean
        assert pgd_acc <= fgsm_acc
        assert cw_acc <= fgsm_acc

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AttackConfig(epsilon=-0.1)
        with pytest.raises(ValueError):
            AttackConfig(steps=0)
        with pytest.raises(ValueError):
            AttackConfig(step_size=0.0)
        with pytest.raises(ValueError):
            AttackConfig(cw_margin=-1.0)
        with pytest.raises(ValueError):
            AttackConfig(cw_binary_search_steps=-1)
        with pytest.raises(ValueError):
            fgsm(BrokenVictim(), np.zeros(3), 0, -0.5)

    def test_default_step_size_resolution(self):
        cfg = AttackConfig(epsilon=8.0 / 255.0, steps=10)
        assert cfg.resolved_step() == pytest.approx(2.0 / 255.0)
        explicit = AttackConfig(epsilon=0.5, steps=10, step_size=0.01)
        assert explicit.resolved_step() == 0.01


def box(cls, score, x1, y1, x2, y2):
    return DetectionBox(class_id=cls, score=score, x1=x1, y1=y1, x2=x2, y2=y2)


def oracle_average_precision(detections, ground_truth):
    """Prefix re-matching plus a naive precision envelope."""

    def greedy_flags(dets, gts):
        taken = [False] * len(gts)
        flags = []
        for det in dets:
            best_iou, best_j = 0.0, -1
            for j, gt in enumerate(gts):
                if taken[j]:
                    continue
                value = iou(det, gt)
                if value > best_iou:
                    best_iou, best_j = value, j
            if best_j >= 0 and best_iou >= 0.5:
                taken[best_j] = True
                flags.append(1.0)
            else:
                flags.append(0.0)
        return flags

    dets = sorted(detections, key=lambda d: -d.score)
    recalls, precisions = [0.0], [0.0]
    for k in range(1, len(dets) + 1):
        flags = greedy_flags(dets[:k], ground_truth)
        true_pos = sum(flags)
        recalls.append(true_pos / len(ground_truth))
        precisions.append(true_pos / k)
    recalls = np.array(recalls)
    precisions = np.array(precisions)
    envelope = np.array([precisions[i:].max() for i in range(len(precisions))])
    return float(np.sum((recalls[1:] - recalls[:-1]) * envelope[1:]))


class TestDetectionMetrics:
    def test_box_validation(self):
        with pytest.raises(ValueError):
            box(0, 0.5, 1.0, 0.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            box(0, 0.5, 0.0, 2.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            box(0, 1.5, 0.0, 0.0, 1.0, 1.0)

    def test_iou_hand_values(self):
        a = box(0, 1.0, 0, 0, 2, 2)
        assert iou(a, a) == 1.0
        assert iou(a, box(0, 1.0, 5, 5, 6, 6)) == 0.0
        assert iou(a, box(0, 1.0, 1, 0, 3, 2)) == pytest.approx(1.0 / 3.0)

    def test_perfect_detections(self):
        gts = [box(0, 1.0, 0, 0, 1, 1), box(0, 1.0, 3, 3, 4, 4)]
        dets = [box(0, 1.0, 0, 0, 1, 1), box(0, 1.0, 3, 3, 4, 4)]
        assert ap_at_05(dets, gts) == {0: 1.0}

    def test_no_detections_gives_zero(self):
        gts = [box(0, 1.0, 0, 0, 1, 1)]
        assert ap_at_05([], gts) == {0: 0.0}

    def test_empty_ground_truth_signaled_as_none(self):
        dets = [box(3, 0.9, 0, 0, 1, 1)]
        assert ap_at_05(dets, []) == {3: None}

    def test_hand_computed_curve(self):
        gts = [box(0, 1.0, 0, 0, 1, 1), box(0, 1.0, 10, 10, 11, 11)]
        dets = [
            box(0, 0.9, 0, 0, 1, 1),
            box(0, 0.8, 20, 20, 21, 21),
            box(0, 0.7, 10, 10, 11, 11),
        ]
        result = ap_at_05(dets, gts)
        assert abs(result[0] - (0.5 * 1.0 + 0.5 * (2.0 / 3.0))) < 1e-12

    def test_each_ground_truth_matched_once(self):
        gts = [box(0, 1.0, 0, 0, 2, 2)]
        dets = [box(0, 0.9, 0, 0, 2, 2), box(0, 0.8, 0, 0, 2, 2)]
        assert ap_at_05(dets, gts) == {0: 1.0}

    def test_classes_scored_independently(self):
        gts = [box(0, 1.0, 0, 0, 1, 1), box(1, 1.0, 5, 5, 6, 6)]
        dets = [box(0, 0.9, 0, 0, 1, 1), box(2, 0.8, 9, 9, 10, 10)]
        result = ap_at_05(dets, gts)
        assert result == {0: 1.0, 1: 0.0, 2: None}

    def test_matches_brute_force_oracle_on_random_instances(self):
        rng = np.random.default_rng(99)
        for case in range(100):
            dets, gts = [], []
            for cls in range(int(rng.integers(1, 3))):
                for _ in range(int(rng.integers(0, 5))):
                    x1 = round(float(rng.uniform(0, 6)) * 2) / 2
                    y1 = round(float(rng.uniform(0, 6)) * 2) / 2
                    gts.append(box(cls, 1.0, x1, y1, x1 + 1.0, y1 + 1.0))
                for _ in range(int(rng.integers(0, 7))):
                    x1 = round(float(rng.uniform(0, 6)) * 2) / 2
                    y1 = round(float(rng.uniform(0, 6)) * 2) / 2
                    score = round(float(rng.uniform(0, 1)), 1)
                    dets.append(box(cls, score, x1, y1, x1 + 1.0, y1 + 1.0))
            result = ap_at_05(dets, gts)
            classes = {b.class_id for b in dets} | {b.class_id for b in gts}
            assert set(result) == classes
            for cls in classes:
                cls_gts = [b for b in gts if b.class_id == cls]
                cls_dets = [b for b in dets if b.class_id == cls]
                if not cls_gts:
                    assert result[cls] is None
                else:
                    expected = oracle_average_precision(cls_dets, cls_gts)
                    assert result[cls] == expected, case

    def test_asr_values(self):
        assert asr(100, 20) == 0.8
        assert asr(50, 50) == 0.0
        assert asr(1000, 135) == 0.865
        assert asr(10, 12) == pytest.approx(-0.2)
        with pytest.raises(ValueError):
            asr(0, 5)
