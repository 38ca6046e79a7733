"""文件处理工具"""
import os
import csv
import json
import math

import numpy as np

from config.constants import FLOAT_FORMAT


def ensure_dir(path):
    """创建输出目录（已存在则忽略）"""
    os.makedirs(path, exist_ok=True)
    return path


def format_float(value):
    """按 17 位有效数字输出浮点数"""
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, FLOAT_FORMAT)


def write_csv(path, header, rows):
    """写出逗号分隔文本：首行为列名，浮点数 17 位有效数字"""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v
                             for v in row])
    return path


def read_csv(path):
    """读回 CSV（列名, 行列表）"""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        return header, [row for row in reader]


def write_json(path, data):
    """写出排序后的 JSON 文档"""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True, default=_json_default)
        f.write("\n")
    return path


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.ndarray,)):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"无法序列化类型 {type(obj).__name__}")


def write_matrix(path, matrix, metadata):
    """写出纯文本矩阵（行优先），以 # 开头的元数据头"""
    header = "\n".join(f"{key}: {metadata[key]}" for key in sorted(metadata))
    np.savetxt(path, np.asarray(matrix), fmt="%" + FLOAT_FORMAT, delimiter=",", header=header)
    return path
