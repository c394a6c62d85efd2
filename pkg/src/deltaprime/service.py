"""HTTP facade over the solvers.

The handlers are plain functions from request models to response
models; the FastAPI application binds them to routes, and the CLI calls
the very same functions in process, so both front ends produce
identical reports for identical requests.
"""

from concurrent.futures import ThreadPoolExecutor

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .bound import optimal_profile, quotient_ordering, theorem_certificate
from .circle import CircleProblem, solve_k_star, transmission_defect
from .exceptions import (
    ConfigError,
    ConvergenceError,
    DomainError,
    GeometryError,
    MeshError,
    OverflowRangeError,
)
from .fem import convergence_study, solve_lambda1
from .geometry import contour_from_spec
from .schemas import (
    BoundReport,
    BoundRequest,
    Certificate,
    CircleReport,
    CircleRequest,
    ContourSpec,
    FemReport,
    FemRequest,
    FemRow,
    HealthReport,
    SweepReport,
    SweepRequest,
    SweepRow,
    VerifyReport,
    VerifyRequest,
    VerifyRow,
)

_TWO_PI = 6.283185307179586476925287

# contour family exercised by verify-theorem when none is given: the
# circle itself, ellipses of growing aspect, and cosine-perturbed
# circles, all with perimeter 2 pi
DEFAULT_FAMILY = [
    ContourSpec(type="circle", R=1.0),
    ContourSpec(type="ellipse", length=_TWO_PI, aspect=1.2),
    ContourSpec(type="ellipse", length=_TWO_PI, aspect=1.5),
    ContourSpec(type="ellipse", length=_TWO_PI, aspect=2.0),
    ContourSpec(type="ellipse", length=_TWO_PI, aspect=3.0),
    ContourSpec(type="perturbed", length=_TWO_PI, mode=2, eps=0.1),
    ContourSpec(type="perturbed", length=_TWO_PI, mode=3, eps=0.1),
    ContourSpec(type="perturbed", length=_TWO_PI, mode=4, eps=0.1),
]


def run_circle(req):
    """Solve the circle secular equation and report bracket and defects."""
    sol = solve_k_star(CircleProblem(req.R, req.omega), req.tol)
    defect_derivative, defect_value = transmission_defect(sol)
    return CircleReport(
        R=req.R,
        omega=req.omega,
        k_star=sol.k_star,
        lambda1=sol.lambda1,
        residual=sol.residual,
        k_lower=sol.k_lower,
        k_upper=sol.k_upper,
        bracket_strict=sol.k_lower < sol.k_star < sol.k_upper,
        defect_value=defect_value,
        defect_derivative=defect_derivative,
    )


def run_sweep(req):
    """Solve the circle problem for every radius, fanned out per item.

    Output order follows input order regardless of scheduling.
    """
    radii = [float(R) for R in req.radii]
    if any(R <= 0.0 for R in radii):
        raise DomainError("all radii must be positive")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be sorted strictly ascending")
    with ThreadPoolExecutor(max_workers=min(8, len(radii))) as pool:
        sols = list(
            pool.map(lambda R: solve_k_star(CircleProblem(R, req.omega), req.tol), radii)
        )
    rows = [
        SweepRow(
            R=s.problem.radius,
            omega=s.problem.omega,
            k_star=s.k_star,
            lambda1=s.lambda1,
            residual=s.residual,
        )
        for s in sols
    ]
    monotone = all(b.lambda1 > a.lambda1 for a, b in zip(sols, sols[1:]))
    return SweepReport(omega=req.omega, lambda_monotone=monotone, rows=rows)


def run_bound(req):
    """Evaluate the parallel-coordinate bound chain for one contour."""
    c = contour_from_spec(req.contour.to_spec())
    radius = c.length / _TWO_PI
    profile = optimal_profile(radius, req.omega, req.T)
    ordering = quotient_ordering(profile, c, req.omega, n=req.n)
    cert = theorem_certificate(c, req.omega, n=req.n)
    return BoundReport(
        omega=req.omega,
        contour=req.contour,
        circle_quotient=ordering["circle"].quotient,
        domain_quotient=ordering["domain"].quotient,
        vacuous=ordering["vacuous"],
        ordered=ordering["ordered"],
        certificate=Certificate(**cert),
    )


def run_fem(req):
    """Run the finite-element eigenvalue solver over an h refinement."""
    c = contour_from_spec(req.contour.to_spec())
    h_list = sorted(set(float(h) for h in req.h), reverse=True)
    r_list = sorted(set(float(r) for r in req.R_out))
    rows = convergence_study(c, req.omega, h_list, r_list, tol=req.tol)
    return FemReport(
        omega=req.omega, contour=req.contour, rows=[FemRow(**r) for r in rows]
    )


def run_verify(req):
    """Check lambda1(contour) <= bound <= lambda1(circle) per contour.

    The finite-element value approximates lambda1 of the contour from
    above, so it is compared against the bound with the fem_slack
    allowance for discretization error.
    """
    specs = req.contours if req.contours else DEFAULT_FAMILY
    rows = []
    for spec in specs:
        c = contour_from_spec(spec.to_spec())
        cert = theorem_certificate(c, req.omega)
        fem = solve_lambda1(c, req.omega, req.h, req.R_out)
        fem_ok = fem["lambda1"] <= cert["domain_bound"] + req.fem_slack
        bound_ok = cert["domain_bound"] <= cert["lambda1_circle"] + req.tol
        rows.append(
            VerifyRow(
                contour=spec,
                lambda1_fem=fem["lambda1"],
                domain_bound=cert["domain_bound"],
                lambda1_circle=cert["lambda1_circle"],
                margin=cert["lambda1_circle"] - fem["lambda1"],
                fem_below_bound=fem_ok,
                bound_below_circle=bound_ok,
                passed=fem_ok and bound_ok,
            )
        )
    return VerifyReport(
        omega=req.omega,
        h=req.h,
        R_out=req.R_out,
        tol=req.tol,
        fem_slack=req.fem_slack,
        passed=all(r.passed for r in rows),
        rows=rows,
    )


app = FastAPI(title="deltaprime", version="1.0.0")


@app.exception_handler(DomainError)
@app.exception_handler(ConfigError)
@app.exception_handler(GeometryError)
async def _invalid(request, exc):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(ConvergenceError)
@app.exception_handler(MeshError)
@app.exception_handler(OverflowRangeError)
async def _numeric(request, exc):
    return JSONResponse(status_code=500, content={"detail": str(exc)})


@app.get("/healthz", response_model=HealthReport)
async def healthz():
    return HealthReport()


@app.post("/circle", response_model=CircleReport)
def circle_endpoint(req: CircleRequest):
    return run_circle(req)


@app.post("/sweep", response_model=SweepReport)
def sweep_endpoint(req: SweepRequest):
    return run_sweep(req)


@app.post("/bound", response_model=BoundReport)
def bound_endpoint(req: BoundRequest):
    return run_bound(req)


@app.post("/fem", response_model=FemReport)
def fem_endpoint(req: FemRequest):
    return run_fem(req)


@app.post("/verify-theorem", response_model=VerifyReport)
def verify_endpoint(req: VerifyRequest):
    return run_verify(req)
