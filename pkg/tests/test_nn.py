import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from renyigan_lab import autodiff as ad
from renyigan_lab.errors import CheckpointError, SaturatedDiscriminator, ShapeMismatch
from renyigan_lab.nn import (
    AdamState,
    Layer,
    Mlp,
    _apply_activation,
    adam_step,
    forward,
    input_gradient_norm_sq,
    input_gradients,
    load_checkpoint,
    mlp_from_dict,
    mlp_to_dict,
    save_checkpoint,
)

from conftest import central_difference, relative_error


def linear_logit(w):
    return Mlp([Layer(np.asarray(w, dtype=float).reshape(-1, 1), np.zeros(1), "sigmoid")])


def random_mlp(rng, sizes, acts, std=0.7):
    return Mlp([Layer(rng.normal(0, std, (i, o)), rng.normal(0, 0.3, o), a)
                for i, o, a in zip(sizes[:-1], sizes[1:], acts)])


def preactivations(net, x):
    out, h = [], np.asarray(x, dtype=float)
    for layer in net.layers:
        pre = h @ layer.weight + layer.bias
        out.append(pre)
        h = _apply_activation(pre, layer)
    return out


def clear_of_kinks(net, x, margin=1e-3):
    return all(np.all(np.abs(p) > margin)
               for p, layer in zip(preactivations(net, x), net.layers)
               if layer.activation == "leaky_relu")


def scalar_of_params(net, x, weights, i):
    def f(value):
        params = [p.copy() for p in net.parameters()]
        params[i] = value
        trial = net.copy()
        trial.set_parameters(params)
        return float(np.sum(trial.predict(x) * weights))
    return f


# forward ---------------------------------------------------------------------

def test_identity_layer():
    net = Mlp([Layer(np.eye(2), np.zeros(2), "identity")])
    out, _ = forward(net, [[1.0, 2.0]])
    assert np.array_equal(out, [[1.0, 2.0]])


def test_zero_sigmoid_unit_outputs_half():
    net = Mlp([Layer(np.zeros((3, 1)), np.zeros(1), "sigmoid")])
    out, _ = forward(net, np.random.default_rng(0).normal(size=(5, 3)))
    assert np.all(out == 0.5)


def test_leaky_relu_layer():
    net = Mlp([Layer(np.eye(2), np.zeros(2), "leaky_relu", 0.2)])
    out, _ = forward(net, [[-1.0, 3.0]])
    assert np.allclose(out, [[-0.2, 3.0]], rtol=0, atol=1e-15)


def test_tape_and_numpy_forward_agree():
    rng = np.random.default_rng(1)
    net = random_mlp(rng, [3, 5, 4, 1], ["leaky_relu", "tanh", "sigmoid"])
    x = rng.normal(size=(7, 3))
    assert np.array_equal(forward(net, x)[0], net.predict(x))


def test_discriminator_outputs_strictly_interior():
    rng = np.random.default_rng(2)
    net = Mlp.discriminator(2, rng)
    out = net.predict(rng.normal(size=(100, 2)) * 50)
    assert np.all((out > 0) & (out < 1))
    assert net.is_discriminator


def test_initialization_scale():
    net = Mlp.generator(8, 2, np.random.default_rng(3), hidden=256)
    w = np.concatenate([l.weight.ravel() for l in net.layers])
    assert abs(w.std() - 0.01) < 1e-3
    assert all(np.all(l.bias == 0) for l in net.layers)


def test_shape_errors():
    net = Mlp.discriminator(2, np.random.default_rng(0))
    with pytest.raises(ShapeMismatch):
        forward(net, np.zeros((4, 3)))
    with pytest.raises(ShapeMismatch):
        forward(net, np.zeros((0, 2)))
    with pytest.raises(ShapeMismatch):
        Mlp([Layer(np.zeros((2, 3)), None), Layer(np.zeros((4, 1)), None)])


# backward --------------------------------------------------------------------

@pytest.mark.parametrize("trial", range(50))
def test_parameter_gradients_match_finite_differences(trial):
    rng = np.random.default_rng(1000 + trial)
    sizes = [int(rng.integers(1, 4)), int(rng.integers(2, 6)), int(rng.integers(2, 6)),
             int(rng.integers(1, 3))]
    acts = ["leaky_relu", str(rng.choice(["tanh", "leaky_relu"])),
            str(rng.choice(["sigmoid", "identity", "tanh"]))]
    net = random_mlp(rng, sizes, acts)
    x = rng.normal(size=(4, sizes[0]))
    while not clear_of_kinks(net, x):
        x = rng.normal(size=(4, sizes[0]))
    weights = rng.normal(size=(4, sizes[-1]))
    fp = net.forward(x)
    loss = ad.total(fp.output * weights)
    grads = fp.tape.backward(loss, fp.params)
    for i, (param, g) in enumerate(zip(net.parameters(), grads)):
        fd = central_difference(scalar_of_params(net, x, weights, i), param)
        assert relative_error(g, fd) < 1e-5


def test_frozen_network_has_no_parameter_leaves():
    net = Mlp.discriminator(2, np.random.default_rng(0))
    fp = net.forward(np.ones((3, 2)), trainable=False)
    assert not any(p.needs_grad for p in fp.params)


# penalty ---------------------------------------------------------------------

def test_constant_discriminator_has_zero_penalty_and_finite_gradient():
    net = Mlp([Layer(np.zeros((2, 4)), np.zeros(4), "leaky_relu"),
               Layer(np.zeros((4, 1)), np.zeros(1), "sigmoid")])
    norms, fp = input_gradient_norm_sq(net, np.ones((3, 2)))
    assert np.all(norms.value == 0.0)
    grads = fp.tape.backward(ad.mean(norms), fp.params)
    assert all(np.all(np.isfinite(g)) for g in grads)


@given(x=st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_linear_logit_penalty_is_squared_weight_norm(x):
    norms, _ = input_gradient_norm_sq(linear_logit([3.0, 4.0]), np.array([x]) * 0.1)
    assert norms.value[0] == pytest.approx(25.0, rel=1e-12)


def test_linear_logit_parameter_gradient_is_twice_weight():
    norms, fp = input_gradient_norm_sq(linear_logit([3.0, 4.0]), np.ones((2, 2)))
    gw, gb = fp.tape.backward(ad.mean(norms), fp.params)
    assert np.allclose(gw.ravel(), [6.0, 8.0]) and np.allclose(gb, 0.0)


def random_disc(rng, hidden=5, depth=2):
    # hidden layers alternate leaky_relu and tanh
    acts = [("leaky_relu", "tanh")[i % 2] for i in range(depth - 1)] + ["sigmoid"]
    return random_mlp(rng, [2] + [hidden] * (depth - 1) + [1], acts)


@pytest.mark.parametrize("trial", range(20))
def test_penalty_value_matches_finite_difference_input_gradient(trial):
    rng = np.random.default_rng(2000 + trial)
    net = random_disc(rng, depth=3)
    x = rng.normal(size=(6, 2))
    while not clear_of_kinks(net, x):
        x = rng.normal(size=(6, 2))
    norms, _ = input_gradient_norm_sq(net, x)
    fd = np.array([np.sum(central_difference(lambda v: float(net.logits(v[None])[0, 0]), row) ** 2)
                   for row in x])
    assert relative_error(norms.value, fd) < 1e-5
    assert relative_error(input_gradients(net, x), [
        central_difference(lambda v: float(net.logits(v[None])[0, 0]), row) for row in x]) < 1e-5


def penalty_value(net, x):
    return float(np.mean(np.sum(input_gradients(net, x) ** 2, axis=1)))


@pytest.mark.parametrize("trial", range(20))
def test_penalty_double_backprop_matches_finite_differences(trial):
    rng = np.random.default_rng(3000 + trial)
    net = random_disc(rng, depth=3)
    x = rng.normal(size=(5, 2))
    while not clear_of_kinks(net, x, margin=1e-2):
        x = rng.normal(size=(5, 2))
    norms, fp = input_gradient_norm_sq(net, x)
    grads = fp.tape.backward(ad.mean(norms), fp.params)
    for i, (param, g) in enumerate(zip(net.parameters(), grads)):
        def f(value, i=i):
            params = [p.copy() for p in net.parameters()]
            params[i] = value
            trial_net = net.copy()
            trial_net.set_parameters(params)
            return penalty_value(trial_net, x)
        assert relative_error(g, central_difference(f, param)) < 1e-4


def test_saturated_discriminator_rejected():
    with pytest.raises(SaturatedDiscriminator):
        input_gradient_norm_sq(linear_logit([100.0, 0.0]), np.array([[1.0, 0.0]]))


def test_penalty_needs_a_discriminator():
    gen = Mlp.generator(2, 2, np.random.default_rng(0))
    with pytest.raises(ValueError):
        input_gradient_norm_sq(gen, np.zeros((1, 2)))


# Adam ------------------------------------------------------------------------

def test_adam_zero_gradient_leaves_params():
    p = [np.array([1.0, -2.0])]
    state = AdamState.for_params(p, learning_rate=0.1)
    adam_step(state, p, [np.zeros(2)])
    assert np.array_equal(p[0], [1.0, -2.0])


def test_adam_first_step_moves_by_learning_rate():
    p = [np.array([0.0])]
    state = AdamState.for_params(p, learning_rate=0.1, epsilon=1e-12)
    adam_step(state, p, [np.array([1.0])])
    assert p[0][0] == pytest.approx(-0.1, rel=1e-9)
    assert state.step == 1


def test_adam_minimizes_square():
    p = [np.array([1.0])]
    state = AdamState.for_params(p, learning_rate=0.1, beta1=0.9)
    for _ in range(100):
        adam_step(state, p, [2.0 * p[0]])
    assert abs(p[0][0]) < 0.05


def test_adam_is_deterministic():
    def run():
        rng = np.random.default_rng(7)
        p = [rng.normal(size=(3, 2))]
        state = AdamState.for_params(p)
        for _ in range(20):
            adam_step(state, p, [rng.normal(size=(3, 2))])
        return p[0]
    assert np.array_equal(run(), run())


def test_adam_shape_mismatch():
    p = [np.zeros(2)]
    with pytest.raises(ShapeMismatch):
        adam_step(AdamState.for_params(p), p, [np.zeros(3)])


# checkpoints -----------------------------------------------------------------

def test_checkpoint_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(4)
    net = random_mlp(rng, [2, 7, 3], ["leaky_relu", "tanh"])
    net.layers[0].weight[0, 0] = 0.1 + 0.2  # a value with a long repr
    save_checkpoint(net, tmp_path / "net.json")
    back = load_checkpoint(tmp_path / "net.json")
    for a, b in zip(net.parameters(), back.parameters()):
        assert a.tobytes() == b.tobytes()
    assert [l.activation for l in back.layers] == ["leaky_relu", "tanh"]


def test_checkpoint_rejects_foreign_documents(tmp_path):
    doc = mlp_to_dict(Mlp.discriminator(2, np.random.default_rng(0)))
    with pytest.raises(CheckpointError):
        mlp_from_dict({**doc, "version": 99})
    with pytest.raises(CheckpointError):
        mlp_from_dict({**doc, "format": "other"})
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "bad.json")
