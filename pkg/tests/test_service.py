"""Tests for the request handlers and the HTTP service."""

import math

import pytest
from fastapi.testclient import TestClient

from deltaprime import service
from deltaprime.bound import theorem_certificate
from deltaprime.circle import CircleProblem, solve_k_star
from deltaprime.geometry import contour_from_spec
from deltaprime.schemas import (
    BoundRequest,
    CircleRequest,
    ContourSpec,
    FemRequest,
    SweepRequest,
    VerifyRequest,
)

_TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def client():
    return TestClient(service.app)


def test_run_circle_matches_solver():
    rep = service.run_circle(CircleRequest(R=2.0, omega=1.0))
    sol = solve_k_star(CircleProblem(2.0, 1.0))
    assert rep.k_star == sol.k_star
    assert rep.lambda1 == sol.lambda1
    assert rep.bracket_strict is True
    assert rep.defect_derivative <= 1e-14
    dumped = rep.model_dump(by_alias=True, mode="json")
    assert dumped["schema"] == 1
    assert dumped["command"] == "circle"


def test_run_sweep_order_and_monotonicity():
    radii = [0.3, 0.7, 1.5, 4.0]
    rep = service.run_sweep(SweepRequest(omega=1.0, radii=radii))
    assert [row.R for row in rep.rows] == radii
    assert rep.lambda_monotone is True
    serial = [solve_k_star(CircleProblem(R, 1.0)).lambda1 for R in radii]
    assert [row.lambda1 for row in rep.rows] == serial


def test_run_bound_matches_certificate():
    spec = ContourSpec(type="ellipse", length=_TWO_PI, aspect=2.0)
    rep = service.run_bound(BoundRequest(contour=spec, omega=1.0))
    cert = theorem_certificate(contour_from_spec(spec.to_spec()), 1.0)
    assert rep.certificate.domain_bound == pytest.approx(
        cert["domain_bound"], rel=1e-12
    )
    assert rep.certificate.certified is True
    assert rep.domain_quotient < rep.circle_quotient < 0.0
    assert rep.ordered is True and rep.vacuous is False


def test_run_fem_sorts_and_reports():
    spec = ContourSpec(type="circle", R=1.0)
    rep = service.run_fem(
        FemRequest(contour=spec, omega=1.0, h=[0.04, 0.08], R_out=[4.0])
    )
    assert [row.h for row in rep.rows] == [0.08, 0.04]
    assert rep.rows[0].error is not None
    assert rep.rows[0].order is None
    assert rep.rows[1].order == pytest.approx(2.0, abs=0.35)


def test_run_verify_passes_and_fails_by_slack():
    specs = [ContourSpec(type="circle", R=1.0)]
    ok = service.run_verify(
        VerifyRequest(contours=specs, omega=1.0, h=0.08, R_out=4.0, fem_slack=2e-2)
    )
    assert ok.passed is True
    assert ok.rows[0].fem_below_bound and ok.rows[0].bound_below_circle
    bad = service.run_verify(
        VerifyRequest(contours=specs, omega=1.0, h=0.08, R_out=4.0, fem_slack=1e-6)
    )
    assert bad.passed is False
    assert bad.rows[0].fem_below_bound is False


def test_default_family_size():
    assert len(service.DEFAULT_FAMILY) == 8
    kinds = [spec.type for spec in service.DEFAULT_FAMILY]
    assert kinds.count("circle") == 1
    assert kinds.count("ellipse") == 4
    assert kinds.count("perturbed") == 3


def test_contour_spec_validation():
    with pytest.raises(ValueError):
        ContourSpec(type="ellipse", aspect=2.0)  # missing length
    with pytest.raises(ValueError):
        ContourSpec(type="circle", R=1.0, aspect=2.0)  # foreign field
    with pytest.raises(ValueError):
        ContourSpec(type="perturbed", length=_TWO_PI, mode=1, eps=0.1)
    spec = ContourSpec(type="perturbed", length=_TWO_PI, mode=3, eps=0.1)
    assert spec.to_spec() == {
        "type": "perturbed",
        "length": _TWO_PI,
        "mode": 3,
        "eps": 0.1,
    }


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.json() == {"schema": 1, "status": "ok"}


def test_http_circle_roundtrip(client):
    r = client.post("/circle", json={"R": 1.0, "omega": 1.0})
    assert r.status_code == 200
    body = r.json()
    assert body["schema"] == 1
    sol = solve_k_star(CircleProblem(1.0, 1.0))
    assert body["k_star"] == sol.k_star
    # responses are deterministic at the byte level
    again = client.post("/circle", json={"R": 1.0, "omega": 1.0})
    assert again.content == r.content


def test_http_validation_maps_to_422(client):
    assert client.post("/circle", json={"R": -1.0, "omega": 1.0}).status_code == 422
    assert (
        client.post("/sweep", json={"omega": 1.0, "radii": [2.0, 1.0]}).status_code
        == 422
    )
    r = client.post(
        "/bound",
        json={"contour": {"type": "ellipse", "aspect": 2.0}, "omega": 1.0},
    )
    assert r.status_code == 422


def test_http_domain_error_maps_to_422(client):
    # passes request validation, rejected by the mesh size guard
    r = client.post(
        "/fem",
        json={
            "contour": {"type": "circle", "R": 1.0},
            "omega": 1.0,
            "h": [0.2],
            "R_out": [4.0],
        },
    )
    assert r.status_code == 422
    assert "h" in r.json()["detail"]


def test_http_bound_endpoint(client):
    r = client.post(
        "/bound",
        json={
            "contour": {"type": "perturbed", "length": _TWO_PI, "mode": 3, "eps": 0.1},
            "omega": 1.0,
        },
    )
    assert r.status_code == 200
    body = r.json()
    assert body["certificate"]["certified"] is True
    assert body["domain_quotient"] < body["certificate"]["lambda1_circle"] + 1e-4
