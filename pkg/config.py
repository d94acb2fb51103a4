import os
from dotenv import load_dotenv

load_dotenv()

# --- Версия кода (попадает в манифест) ---
CODE_VERSION = os.getenv("PVLAB_CODE_VERSION", "0.4.0")

# --- Параллелизм ---
# --threads имеет приоритет, PVLAB_THREADS — запасной вариант
PVLAB_THREADS = int(os.getenv("PVLAB_THREADS", "1"))
PVLAB_EXECUTOR = os.getenv("PVLAB_EXECUTOR", "process")  # process | thread

# --- Seed ---
DEFAULT_SEED_ROOT = os.getenv("PVLAB_SEED", "0x5eed0f1a2b3c4d5e")

# --- Вывод ---
OUT_DIR = os.getenv("PVLAB_OUT_DIR", "results")
LOG_LEVEL = os.getenv("PVLAB_LOG_LEVEL", "INFO")

# --- Часовой пояс (метки времени в манифесте) ---
TIMEZONE = os.getenv("TIMEZONE", "UTC")

# --- Монте-Карло для объёма симметрической разности ---
SYMDIFF_BUDGET = int(os.getenv("PVLAB_SYMDIFF_BUDGET", "4096"))
SYMDIFF_SE_CAP = float(os.getenv("PVLAB_SYMDIFF_SE_CAP", "1e-4"))
SYMDIFF_MAX_DOUBLINGS = int(os.getenv("PVLAB_SYMDIFF_MAX_DOUBLINGS", "3"))

# --- Эксперименты ---
TAINT_THRESHOLD = float(os.getenv("PVLAB_TAINT_THRESHOLD", "0.01"))
BOOTSTRAP_RESAMPLES = int(os.getenv("PVLAB_BOOTSTRAP", "1000"))
ZONE_EPSILON = float(os.getenv("PVLAB_ZONE_EPSILON", "0.1"))
MARGIN_MULTIPLE = float(os.getenv("PVLAB_MARGIN_MULTIPLE", "5"))
MIN_FIT_POINTS = 4
MIN_FIT_REPLICATES = 100
MIN_CLT_REPLICATES = 400
MIN_ITERATED_REPLICATES = 200

DEFAULT_LAMBDA_GRID = {
    2: [250.0, 500.0, 1000.0, 2000.0, 4000.0],
    3: [500.0, 1000.0, 2000.0, 4000.0],
}

# --- Полупространственная модель (единицы единичной интенсивности) ---
SLAB_DEFAULTS = {
    2: {"L": 20.0, "h": 8.0},
    3: {"L": 6.0, "h": 4.0},
}
SLAB_REPLICATES = int(os.getenv("PVLAB_SLAB_REPLICATES", "2000"))

# --- Геометрия ---
# Во сколько раз сторожевые точки дальше от области, чем её полудиаметр
SENTINEL_FACTOR = 16.0
# Начальная ширина призрачной полосы для периодического слоя (в единицах шага λ^{-1/d})
GHOST_WIDTH_START = 4.0
# Наибольшее число точек на одной сфере, которое перетриангулируется перебором (d=3)
COSPHERICAL_LIMIT = int(os.getenv("PVLAB_COSPHERICAL_LIMIT", "20"))
