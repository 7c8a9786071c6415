"""FastAPI application wrapping the core rendering and evaluation API."""
from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import FogConfig, default_level_configs, normalize_mode
from ..depthio import SceneReference, calibrate
from ..errors import ConfigError, DatasetError, DepthFileError, FogsimError
from ..fogmodel import beta_from_level, beta_from_visibility
from ..harness import sweep
from ..metrics import evaluate, load_mot_file
from ..pipeline import render_dataset
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="fogsim",
        version=__version__,
        description=(
            "Physics-based fog rendering over tracking datasets and "
            "multi-object tracking robustness evaluation."
        ),
    )

    @app.exception_handler(ConfigError)
    async def _config_error(request, exc: ConfigError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(DatasetError)
    async def _dataset_error(request, exc: DatasetError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(DepthFileError)
    async def _depth_error(request, exc: DepthFileError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(FogsimError)
    async def _fogsim_error(request, exc: FogsimError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(FileNotFoundError)
    async def _missing_file(request, exc: FileNotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/attenuation", response_model=schemas.AttenuationResponse)
    def attenuation(req: schemas.AttenuationRequest) -> schemas.AttenuationResponse:
        if (req.visibility is None) == (req.level is None):
            raise ConfigError("exactly one of visibility or level must be set")
        if req.visibility is not None:
            att = beta_from_visibility(req.visibility)
        else:
            assert req.level is not None
            att = beta_from_level(req.level)
        return schemas.AttenuationResponse(
            beta=att.beta, visibility=att.visibility, level=req.level
        )

    @app.post("/calibration", response_model=schemas.CalibrationResponse)
    def calibration(req: schemas.CalibrationRequest) -> schemas.CalibrationResponse:
        cal = calibrate(SceneReference(req.d_min, req.d_max))
        return schemas.CalibrationResponse(scale=cal.scale, shift=cal.shift)

    @app.post("/render", response_model=schemas.RenderResponse)
    def render(req: schemas.RenderRequest) -> schemas.RenderResponse:
        cfg = req.config.to_config()
        result = render_dataset(
            req.input_dir,
            cfg,
            req.output_dir,
            depth_root=req.depth_dir,
            threads=req.threads,
        )
        outcomes = [
            schemas.SequenceOutcome(
                name=r.name,
                status="rendered",
                frames=r.n_frames,
                manifest=str(r.manifest_path),
            )
            for r in result.rendered
        ]
        outcomes.extend(
            schemas.SequenceOutcome(name=name, status="failed", error=message)
            for name, message in result.failures
        )
        return schemas.RenderResponse(
            outcomes=outcomes,
            n_rendered=len(result.rendered),
            n_failed=len(result.failures),
        )

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate_endpoint(req: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
        gt = load_mot_file(req.gt_path, kind="gt")
        predictions = load_mot_file(req.results_path, kind="result")
        report = evaluate(gt, predictions, req.iou_threshold)
        return schemas.EvaluateResponse(
            hota=report.hota,
            mota=report.mota,
            motp=report.motp,
            idf1=report.idf1,
            id_switches=report.id_switches,
            false_positives=report.false_positives,
            false_negatives=report.false_negatives,
            gt_count=report.gt_count,
        )

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep_endpoint(req: schemas.SweepRequest) -> schemas.SweepResponse:
        scene = req.scene.to_scene()
        mode = normalize_mode(req.mode)
        configs: tuple[FogConfig, ...] = default_level_configs(
            tuple(req.levels), mode=mode, seed=req.seed
        )
        report = sweep(
            scene,
            configs,
            model=req.degradation.to_model(),
            iou_threshold=req.iou_threshold,
        )
        rows = [
            schemas.SweepRowModel(
                label=r.label,
                hota=r.hota,
                mota=r.mota,
                motp=r.motp,
                idf1=r.idf1,
                id_switches=r.id_switches,
            )
            for r in report.rows
        ]
        return schemas.SweepResponse(
            rows=rows, csv=report.to_csv(), markdown=report.to_markdown()
        )

    return app
