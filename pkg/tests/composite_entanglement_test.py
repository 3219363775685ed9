from __future__ import annotations

import math

import pytest

from quditwigner import composite_entanglement
from quditwigner.composite_entanglement import Route
from quditwigner.field_arith import make_prime_dim
from quditwigner.presets import momentum_state
from quditwigner.presets import position_state


def test_closed_form_at_known_times() -> None:
    assert composite_entanglement.purity_closed_form(0.0) == pytest.approx(1.0)
    assert composite_entanglement.linear_entropy_closed_form(
        2 * math.pi / 3
    ) == pytest.approx(2 / 3)
    assert composite_entanglement.linear_entropy_closed_form(
        2 * math.pi
    ) == pytest.approx(0.0, abs=1e-12)
    assert composite_entanglement.linear_entropy_closed_form(0.1) == pytest.approx(
        8.8225e-3, abs=1e-6
    )


def test_short_time_law_is_leading_order() -> None:
    chi_t = 1e-3

    exact = composite_entanglement.linear_entropy_closed_form(chi_t)

    expected = composite_entanglement.short_time_law(chi_t)
    assert exact == pytest.approx(expected, rel=1e-3)


def test_general_law_reduces_to_qutrit_law() -> None:
    dim = make_prime_dim(3)

    result = composite_entanglement.product_position_variance_law(0.2, dim)

    assert result == pytest.approx(composite_entanglement.short_time_law(0.2))


def test_position_variance() -> None:
    dim = make_prime_dim(5)

    assert composite_entanglement.position_variance(
        position_state(dim, 3), dim
    ) == pytest.approx(0.0)
    assert composite_entanglement.position_variance(
        momentum_state(dim, 0), dim
    ) == pytest.approx(2.0)


@pytest.mark.parametrize("route", [Route.EXACT, Route.KERNEL, Route.PATH_INTEGRAL])
@pytest.mark.parametrize("chi_t", [0.25, 0.5, math.pi / 2, math.pi])
def test_routes_match_closed_form(route: Route, chi_t: float) -> None:
    record = composite_entanglement.linear_entropy_exact(chi_t, route, steps=2)

    assert record.source is route
    assert record.closed_form_error is not None
    assert record.closed_form_error < 1e-10
    assert record.linear_entropy == pytest.approx(1.0 - record.purity)


def test_path_integral_record_carries_steps() -> None:
    record = composite_entanglement.linear_entropy_exact(
        0.3, Route.PATH_INTEGRAL, steps=3
    )
    exact = composite_entanglement.linear_entropy_exact(0.3, Route.EXACT)

    assert record.steps == 3
    assert exact.steps is None


def test_closed_form_route_is_qutrit_only() -> None:
    with pytest.raises(ValueError):
        composite_entanglement.linear_entropy_exact(
            0.5, Route.CLOSED_FORM, dim=make_prime_dim(5)
        )


def test_routes_agree_beyond_qutrits() -> None:
    dim = make_prime_dim(5)

    exact = composite_entanglement.linear_entropy_exact(0.4, Route.EXACT, dim=dim)
    kernel = composite_entanglement.linear_entropy_exact(0.4, Route.KERNEL, dim=dim)

    assert kernel.purity == pytest.approx(exact.purity, abs=1e-10)
    assert exact.closed_form_error is None


def test_entanglement_table_is_time_major() -> None:
    records = composite_entanglement.entanglement_table(
        [0.1, 0.2], [Route.CLOSED_FORM, Route.EXACT]
    )

    assert [(record.chi_t, record.source) for record in records] == [
        (0.1, Route.CLOSED_FORM),
        (0.1, Route.EXACT),
        (0.2, Route.CLOSED_FORM),
        (0.2, Route.EXACT),
    ]


def test_product_state_has_no_negativity() -> None:
    assert composite_entanglement.evolved_negativity(0.0) == pytest.approx(
        0.0, abs=1e-12
    )
    assert composite_entanglement.evolved_negativity(1.0) >= 0.0
