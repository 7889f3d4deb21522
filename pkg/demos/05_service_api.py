"""
The prediction service, exercised in-process
============================================

The HTTP API serves dataset statistics, paginated samples, exact oracle
lookups, and model predictions (always accompanied by the oracle's true
label).  Here the FastAPI app is driven through a test client; `krk
serve` runs the same app on a real port, with the browser UI at /ui.
"""

import json

from fastapi.testclient import TestClient

from krklab import EncodingScheme, SplitSpec, encode, split, tablebase
from krklab.artifacts import save_model
from krklab.harness import load_records
from krklab.models import LogisticRegressionConfig, train_logistic_regression
from krklab.server import create_app, load_registry
import tempfile
from pathlib import Path

records = load_records("oracle:generate")
tb = tablebase.solve()

# train one quick model and register it the way `krk train --out` would
matrix = encode(records, EncodingScheme("onehot", "none"))
train, _ = split(matrix, SplitSpec(0.7, seed=7))
model = train_logistic_regression(train, LogisticRegressionConfig(iterations=60))
models_dir = Path(tempfile.mkdtemp())
save_model(model, models_dir / "lr.model.json", fitted_encoding=matrix.encoding)

client = TestClient(create_app(tb, records, load_registry(models_dir)))

print("GET /api/health")
print(" ", client.get("/api/health").json())

print("\nGET /api/dataset/stats (first rows)")
stats = client.get("/api/dataset/stats").json()
for row in stats["classes"][:3]:
    print(" ", row)

print("\nGET /api/oracle/classify?wk=a1&wr=b3&bk=c2")
print(" ", client.get("/api/oracle/classify",
                      params={"wk": "a1", "wr": "b3", "bk": "c2"}).json())

print("\nPOST /api/predict on the mate-in-one position")
body = client.post("/api/predict", json={
    "wk": "c1", "wr": "c3", "bk": "a2", "model_id": "lr",
}).json()
print(f"  model says {body['predicted_class']!r}, "
      f"tablebase says {body['oracle_class']!r}, agree={body['agree']}")

print("\nillegal placements are rejected with the violated rule:")
bad = client.post("/api/predict", json={
    "wk": "a1", "wr": "c3", "bk": "a2", "model_id": "lr",
})
print(f"  HTTP {bad.status_code}: {json.dumps(bad.json())}")
