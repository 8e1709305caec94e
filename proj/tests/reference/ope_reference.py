"""Independent OPE metrics: ope_reference.py RESULTS_DIR ANNOTATIONS_DIR -> JSON on stdout."""
import json
import pathlib
import sys

import numpy as np


def load(path):
    rows = [l.replace("\t", ",").replace(" ", ",").split(",") for l in path.read_text().splitlines()]
    b = np.array([[float(v) for v in r if v] for r in rows if any(r)], dtype=np.float64)
    b[:, :2] -= 1.0
    return b


def scores(pred, gt):
    ok = (gt[:, 2] > 0) & (gt[:, 3] > 0)
    pred, gt = np.nan_to_num(pred[ok]), gt[ok]
    lo = np.maximum(pred[:, :2], gt[:, :2])
    hi = np.minimum(pred[:, :2] + pred[:, 2:], gt[:, :2] + gt[:, 2:])
    inter = np.prod(np.clip(hi - lo, 0, None), axis=1) * np.all(hi > lo, axis=1)
    union = np.prod(pred[:, 2:], axis=1) + np.prod(gt[:, 2:], axis=1) - inter
    iou = np.where(union > 0, inter / np.where(union > 0, union, 1), 0.0)
    d = (pred[:, :2] + pred[:, 2:] / 2) - (gt[:, :2] + gt[:, 2:] / 2)
    dist = np.hypot(d[:, 0], d[:, 1])
    nd = d / gt[:, 2:]
    norm = np.hypot(nd[:, 0], nd[:, 1])
    succ = np.array([(iou > i / 20).mean() for i in range(21)])
    prec = np.array([(dist <= float(i)).mean() for i in range(51)])
    npre = np.array([(norm <= i / 100).mean() for i in range(51)])
    return succ, prec, npre


res, ann = map(pathlib.Path, sys.argv[1:3])
out, curves = {}, []
for p in sorted(res.glob("*.txt")):
    gt_path = ann / p.name if (ann / p.name).exists() else ann / p.stem / "groundtruth.txt"
    s, pr, n = scores(load(p), load(gt_path))
    curves.append((s, pr, n))
    out[p.stem] = {"auc": s.mean(), "precision_20": pr[20], "norm_precision": n.mean()}
s, pr, n = (np.mean([c[k] for c in curves], axis=0) for k in range(3))
out["_aggregate"] = {"auc": s.mean(), "precision_20": pr[20], "norm_precision": n.mean()}
print(json.dumps(out, indent=1))
