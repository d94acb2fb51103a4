"""Тесты пула исполнителей."""

import pytest

from workers import run_tasks


def square(x):
    return x * x


def fail_on_three(x):
    if x == 3:
        raise RuntimeError("boom")
    return x


class TestRunTasks:
    @pytest.mark.parametrize("threads, executor", [(1, "thread"), (4, "thread"), (2, "process")])
    def test_order_is_preserved(self, threads, executor):
        assert run_tasks(square, list(range(20)), threads, executor) == [x * x for x in range(20)]

    def test_errors_propagate(self):
        with pytest.raises(RuntimeError):
            run_tasks(fail_on_three, list(range(5)), 2, "thread")

    def test_empty(self):
        assert run_tasks(square, [], 4, "thread") == []
