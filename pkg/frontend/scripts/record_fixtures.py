"""Record a live what-if session against the real rating service.

Builds a seeded corpus and model with the vrstars CLI, boots the HTTP
service, then records every exchange the UI test-suite replays: the schema,
the initial views, and a full apply-the-top-suggestion chain until nothing
is left to suggest, plus one un-toggle. Output: tests/fixtures/session.json.

Usage: python3 scripts/record_fixtures.py  (from the frontend/ directory)
"""
import json
import pathlib
import subprocess
import sys
import tempfile
import time
import urllib.error
import urllib.request

PORT = 8911
BASE = f"http://127.0.0.1:{PORT}"
OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "session.json"

exchanges = []


def plain(method: str, path: str, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(
        BASE + path, data=data, method=method,
        headers={"content-type": "application/json"} if body is not None else {},
    )
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read()), resp.status


def call(method: str, path: str, body=None):
    payload, status = plain(method, path, body)
    exchanges.append(
        {"method": method, "path": path, "body": body, "status": status, "response": payload}
    )
    return payload


def base_map(schema, numeric_values):
    return {
        s["name"]: (0 if s["kind"] == "binary" else numeric_values.get(s["name"], 0))
        for s in schema
    }


def pick_numeric_values():
    """A numeric base where the top suggestion visibly raises the rating."""
    schema, _ = plain("GET", "/v1/schema")
    for size in (28.0, 30.0, 32.0, 34.0, 36.0, 40.0, 44.0, 48.0, 55.0):
        values = {"size_m2": size, "n_rooms": 2.0}
        features = base_map(schema, values)
        suggest, _ = plain("POST", "/v1/suggest", {"features": features})
        if not suggest["items"]:
            continue
        top = suggest["items"][0]["feature"]
        what, _ = plain("POST", "/v1/whatif", {"features": features, "flips": [top]})
        if what["after"]["rating"] > what["before"]["rating"]:
            return values
    raise SystemExit("no probed base puts the top suggestion on a class boundary")


def build_model(root: pathlib.Path) -> pathlib.Path:
    props, stays = root / "props.jsonl", root / "stays.csv"
    schema, labels, model = root / "schema.json", root / "labels.jsonl", root / "model.json"
    run = lambda *args: subprocess.run([str(a) for a in args], check=True)
    run("vrstars", "synth", "--out-properties", props, "--out-stays", stays,
        "--out-schema", schema, "--out-truth", root / "truth.jsonl",
        "--n-properties", 900, "--n-guests", 600, "--stays-per-guest", 6, "--seed", 11)
    run("vrstars", "label", "--properties", props, "--stays", stays,
        "--schema", schema, "--out", labels, "--min-support", 1)
    run("vrstars", "train", "--properties", props, "--schema", schema,
        "--labels", labels, "--out", model, "--n-rounds", 12, "--seed", 11)
    return model


def wait_for_service():
    for _ in range(50):
        try:
            urllib.request.urlopen(BASE + "/v1/schema")
            return
        except urllib.error.URLError:
            time.sleep(0.2)
    raise SystemExit("service never came up")


def main():
    with tempfile.TemporaryDirectory() as tmp:
        model = build_model(pathlib.Path(tmp))
        server = subprocess.Popen(
            ["vrstars", "serve", "--model", str(model), "--port", str(PORT)],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
        )
        try:
            wait_for_service()
            numeric_values = pick_numeric_values()
            schema = call("GET", "/v1/schema")

            # mirror defaultFeatureMap: binaries 0, numerics from the table
            features = base_map(schema, numeric_values)
            call("POST", "/v1/rate", {"features": features})
            call("POST", "/v1/explain", {"features": features})
            suggest = call("POST", "/v1/suggest", {"features": features})

            chain = []
            while suggest["items"]:
                name = suggest["items"][0]["feature"]
                chain.append(name)
                call("POST", "/v1/whatif", {"features": features, "flips": [name]})
                features = {**features, name: 1}
                call("POST", "/v1/explain", {"features": features})
                suggest = call("POST", "/v1/suggest", {"features": features})
                if len(chain) > 40:
                    raise SystemExit("suggestion chain did not terminate")

            # un-toggle fixture: first flip taken back from the one-flip state
            first = dict(base_map(schema, numeric_values), **{chain[0]: 1})
            call("POST", "/v1/whatif", {"features": first, "flips": [chain[0]]})
        finally:
            server.terminate()
            server.wait()

    raised = any(
        e["path"] == "/v1/whatif"
        and e["response"]["after"]["rating"] > e["response"]["before"]["rating"]
        for e in exchanges
    )
    if not raised:
        raise SystemExit("recorded chain never raises the rating; fixture too weak")

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(
        {"numeric_values": numeric_values, "chain": chain, "exchanges": exchanges},
        indent=1,
    ))
    print(f"wrote {OUT} ({len(exchanges)} exchanges, chain of {len(chain)})", file=sys.stderr)


if __name__ == "__main__":
    main()
