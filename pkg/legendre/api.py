import time
from typing import List, Optional

from fastapi import FastAPI, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from slowapi import Limiter
from slowapi.errors import RateLimitExceeded
from slowapi.util import get_remote_address
from starlette.requests import Request

from . import __version__, schemas
from .asymptotics import REFERENCE_ROWS, TABLES, reproduce_table, table
from .bhargava import bhargava_factorial
from .config import config
from .constants import ACCELERATED, MODES, beta_f, constant_beta, constant_C
from .errors import DomainError, LegendreError, ParseError
from .factorials import factorial, log_factorial
from .fmap import LinearCertificate, parse_fmap
from .formats import decimal_digits, decimal_string, parse_integer_set, parse_rows
from .logging_config import logger, setup_logging
from .numeric import to_fraction

# Initialize logging
setup_logging()

app = FastAPI(title='Legendre API - Generalized Factorials', version=__version__)

# Rate limiting setup
limiter = Limiter(key_func=get_remote_address)
app.state.limiter = limiter


@app.exception_handler(RateLimitExceeded)
async def rate_limit_handler(request: Request, exc: RateLimitExceeded):
    """Custom rate limit exceeded handler."""
    client_host = request.client.host if request.client else 'unknown'
    logger.warning(f'Rate limit exceeded: {client_host}')
    return JSONResponse(
        status_code=429,
        content={'detail': f'Rate limit exceeded. Maximum {config.rate_limit}.'},
    )


@app.exception_handler(LegendreError)
async def legendre_error_handler(request: Request, exc: LegendreError):
    """Library errors become JSON with the status their class carries."""
    logger.warning(f'{request.method} {request.url.path} - {type(exc).__name__}: {exc}')
    body = schemas.ErrorOut(error=type(exc).__name__, detail=str(exc), exit_code=exc.exit_code)
    return JSONResponse(status_code=exc.http_status, content=body.model_dump())


app.add_middleware(
    CORSMiddleware,
    allow_origins=config.allowed_origins,
    allow_credentials=True,
    allow_methods=['GET'],
    allow_headers=['*'],
)


# Middleware for request/response logging
@app.middleware('http')
async def log_requests(request: Request, call_next):
    """Log all requests and responses with timing."""
    start_time = time.time()

    client_host = request.client.host if request.client else 'unknown'
    logger.info(f'{request.method} {request.url.path} - Client: {client_host}')

    try:
        response = await call_next(request)
        process_time = time.time() - start_time
        logger.info(
            f'{request.method} {request.url.path} - Status: {response.status_code} - Time: {process_time:.3f}s'
        )
        return response
    except Exception as e:
        process_time = time.time() - start_time
        logger.error(
            f'{request.method} {request.url.path} - Error: {str(e)} - Time: {process_time:.3f}s',
            exc_info=True
        )
        raise


@app.get('/')
async def root():
    """Root endpoint - API information."""
    return {
        'message': 'Legendre API - Generalized Factorials',
        'version': __version__,
        'docs': '/docs',
        'endpoints': {
            'ffact': '/ffact',
            'bhargava': '/bhargava',
            'constant': '/constant/{name}',
            'table': '/table/{which}',
        },
    }


@app.get('/health')
async def health():
    """Health check endpoint."""
    return {'status': 'healthy', 'service': 'Legendre API', 'version': __version__}


@app.get('/status')
async def status():
    """Configuration summary."""
    problems = config.validate_config()
    return {
        'status': 'degraded' if problems else 'operational',
        'problems': problems,
        'config': config.get_config_summary(),
    }


@app.get('/ffact', response_model=schemas.FactorialOut)
@limiter.limit(config.rate_limit)
def ffact(request: Request, f: str, n: int = Query(..., ge=0)):
    """n!_f with its factorization and log enclosure."""
    fmap = parse_fmap(f)
    vector, value = factorial(fmap, n)
    logger.debug(f'ffact: f={fmap.dsl}, n={n}, support={len(vector)}')
    return schemas.FactorialOut(
        f=fmap.dsl,
        n=n,
        factorization=schemas.ExponentVectorOut.of(vector),
        digits=decimal_digits(value),
        value=decimal_string(value, config.digit_cap),
        log=schemas.EnclosureOut.of(log_factorial(fmap, n)),
    )


@app.get('/bhargava', response_model=schemas.BhargavaOut, response_model_exclude_none=True)
@limiter.limit(config.rate_limit)
def bhargava(request: Request, set: str, n: int = Query(..., ge=0), show_orderings: bool = False):
    """n!_S from p-orderings of S."""
    S = parse_integer_set(set)
    return schemas.BhargavaOut.of(S.label, bhargava_factorial(S, n), show_orderings)


@app.get('/constant/{name}', response_model=schemas.ConstantResultOut)
@limiter.limit(config.rate_limit)
def constant(request: Request, name: str, tol: float = 1e-5, mode: str = ACCELERATED,
             f: Optional[str] = None, alpha: Optional[int] = None, M: Optional[str] = None):
    """C, beta or beta_f. Accelerated mode is the default here; rigorous runs are slow."""
    if mode not in MODES:
        raise ParseError(f"mode must be one of {MODES}")
    if name == 'C':
        result = constant_C(tol, mode)
    elif name == 'beta':
        result = constant_beta(tol, mode)
    elif name == 'beta_f':
        if f is None or alpha is None or M is None:
            raise ParseError('beta_f needs f, alpha and M')
        result = beta_f(parse_fmap(f), LinearCertificate(alpha, to_fraction(M)), tol, mode)
    else:
        raise DomainError(f"unknown constant {name!r}; choose C, beta or beta_f")
    return schemas.ConstantResultOut.of(result)


@app.get('/table/{which}', response_model=List[schemas.TableRowOut], response_model_exclude_none=True)
@limiter.limit(config.rate_limit)
def table_rows(request: Request, which: int, rows: Optional[str] = None, beta_mode: str = ACCELERATED,
               cross_check: bool = False):
    """Rows of a reference table, compared with the printed values when available."""
    spec = TABLES.get(which)
    if spec is None:
        raise DomainError(f"no table {which}; choose 1 or 2")
    if beta_mode not in MODES:
        raise ParseError(f"beta_mode must be one of {MODES}")
    requested = parse_rows(rows) if rows else list(REFERENCE_ROWS)
    if all(n in spec.reference for n in requested):
        return [schemas.TableRowOut.of(c.row, c) for c in reproduce_table(which, requested, beta_mode, cross_check)]
    computed = table(spec.f, spec.cert, requested, spec.shift, beta_mode=beta_mode, cross_check=cross_check)
    return [schemas.TableRowOut.of(row) for row in computed]
