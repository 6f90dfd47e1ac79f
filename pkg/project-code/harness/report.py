"""
📊 扫描报告：CSV 与 JSON

CSV 每行一个 (运算, N)，列为
op,N,preproc_steps,query_steps_max,query_steps_mean,samples,verdicts。
samples 是整次扫描的样本总数，verdicts 是整次扫描的判定，
形如 linear=ok;constant=ok。
"""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from common.errors import ConfigError

from .sweep import SweepResult

CSV_COLUMNS = (
    "op", "N", "preproc_steps", "query_steps_max", "query_steps_mean", "samples", "verdicts",
)


def _verdict_text(data: Dict[str, Any]) -> str:
    def flag(value: bool) -> str:
        return "ok" if value else "fail"
    return (f"linear={flag(data['verdict_linear_preproc'])};"
            f"constant={flag(data['verdict_constant_query'])}")


def _as_dict(result) -> Dict[str, Any]:
    return result.to_dict() if isinstance(result, SweepResult) else dict(result)


def csv_rows(results: Iterable) -> List[List[Any]]:
    rows = []
    for result in results:
        data = _as_dict(result)
        verdicts = _verdict_text(data)
        for n in data["n_values"]:
            key = str(n)
            rows.append([
                data["op"], n, data["preproc_steps"].get(key, 0),
                data["query_steps_max"].get(key, ""),
                data["query_steps_mean"].get(key, ""),
                data["samples"], verdicts,
            ])
    return rows


def to_csv(results: Iterable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(csv_rows(results))
    return buffer.getvalue()


def to_json(results: Sequence) -> str:
    """多个扫描结果合成一个 JSON 文档（键排序，相同输入得到相同字节）"""
    payload = {
        "results": [_as_dict(r) for r in results],
        "ok": all(_as_dict(r)["ok"] for r in results),
    }
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)


def save_result(result: SweepResult, path: Path):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(result.to_dict(), f, ensure_ascii=False, indent=2, sort_keys=True)


def load_results(paths: Sequence[Path]) -> List[Dict[str, Any]]:
    """读取 sweep 写出的 JSON；文件可以是单个结果或 {"results": [...]}"""
    results: List[Dict[str, Any]] = []
    for path in paths:
        path = Path(path)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"无法读取扫描结果 {path}: {e}")
        items = data.get("results", [data]) if isinstance(data, dict) else data
        for item in items:
            if not isinstance(item, dict) or "op" not in item or "n_values" not in item:
                raise ConfigError(f"{path} 不是扫描结果")
            results.append(item)
    return results


__all__ = ["CSV_COLUMNS", "csv_rows", "to_csv", "to_json", "save_result", "load_results"]
