import pytest

from services.task_queue import BackgroundTaskQueue


@pytest.fixture
def queue():
    pool = BackgroundTaskQueue(max_workers=2)
    yield pool
    pool.shutdown()


def test_map_keeps_input_order(queue):
    outcomes = queue.map(lambda k: k * k, range(10))
    assert [o["status"] for o in outcomes] == ["completed"] * 10
    assert [o["result"] for o in outcomes] == [k * k for k in range(10)]


def test_failures_are_captured(queue):
    def explode(_):
        raise ValueError("nope")

    (outcome,) = queue.map(explode, [1])
    assert outcome["status"] == "failed"
    assert isinstance(outcome["error"], ValueError)


def test_task_lifecycle(queue):
    task_id = queue.submit_task(sum, [1, 2, 3])
    assert queue.wait_for_completion(task_id, timeout=5.0)
    assert queue.get_task_status(task_id)["result"] == 6
    assert queue.pop_result(task_id)["status"] == "completed"
    assert queue.get_task_status(task_id) == {"status": "not_found"}
    assert not queue.wait_for_completion("missing")
