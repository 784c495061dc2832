"""Command-line client for the verification service.

``msk check`` runs a scenario file and prints one line per check;
``msk catalog`` emits a catalog instance as a runnable scenario document.
Both run in-process by default and against a remote service with
``--server``.  Exit codes: 0 all checks pass, 1 any check fails, 2 on
scenario or usage errors.
"""

import argparse
import json
import sys

from .errors import EngineError, ScenarioError
from .scenario import ReportModel, ScenarioModel
from .service.models import CatalogRequest, CheckRequest


def _json_dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _post(server: str, path: str, payload: dict) -> dict:
    import httpx

    response = httpx.post(f"{server.rstrip('/')}{path}", json=payload, timeout=600.0)
    if response.status_code != 200:
        detail = response.json().get("detail", response.text)
        raise ScenarioError(f"server rejected the request: {detail}")
    return response.json()


def _cmd_check(args) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except OSError as err:
        print(f"error: cannot read {args.file}: {err}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as err:
        print(f"error: {args.file} is not valid JSON: {err}", file=sys.stderr)
        return 2
    try:
        scenario = ScenarioModel.model_validate(document)
        request = CheckRequest(scenario=scenario, seed=args.seed, samples=args.samples)
        if args.server:
            data = _post(args.server, "/check", request.model_dump())
            report = ReportModel.model_validate(data["report"])
            exit_code = int(data["exit_code"])
        else:
            from .service.app import handle_check

            response = handle_check(request)
            report = response.report
            exit_code = response.exit_code
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except EngineError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # pydantic validation and transport errors
        print(f"error: {err}", file=sys.stderr)
        return 2
    for line in report.human_lines():
        print(line)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as handle:
            handle.write(_json_dump(report.model_dump()))
            handle.write("\n")
    return exit_code


def _cmd_catalog(args) -> int:
    params = {}
    for item in args.params:
        if "=" not in item:
            print(f"error: parameters are key=value, got {item!r}", file=sys.stderr)
            return 2
        key, _, value = item.partition("=")
        params[key.strip()] = value.strip()
    try:
        request = CatalogRequest(name=args.name, params=params)
        if args.server:
            data = _post(args.server, "/catalog", request.model_dump())
            scenario = data["scenario"]
        else:
            from .service.app import handle_catalog

            scenario = handle_catalog(request).scenario.model_dump(exclude_none=True)
    except EngineError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    text = _json_dump(scenario)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as handle:
            handle.write(text)
            handle.write("\n")
    else:
        print(text)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msk", description="exact multisymplectic structure checks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run a scenario file")
    check.add_argument("file", help="scenario JSON file")
    check.add_argument("--seed", type=int, default=None, help="override the sampling seed")
    check.add_argument(
        "--samples", type=int, default=None, help="override the sample-point count"
    )
    check.add_argument("--json", default=None, help="write the JSON report to a file")
    check.add_argument("--server", default=None, help="send the request to a running service")
    check.set_defaults(handler=_cmd_check)

    catalog = sub.add_parser("catalog", help="emit a catalog instance as a scenario")
    catalog.add_argument("name", help="catalog entry name")
    catalog.add_argument("params", nargs="*", help="key=value parameters")
    catalog.add_argument("--json", default=None, help="write the scenario to a file")
    catalog.add_argument("--server", default=None, help="send the request to a running service")
    catalog.set_defaults(handler=_cmd_catalog)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.handler(args)


def run() -> None:
    sys.exit(main())
