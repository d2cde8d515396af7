# services/task_queue.py
import threading
import time
import uuid
from queue import Empty, Queue
from typing import Any, Callable, Dict, Iterable, List
import logging

from services.config import WORKER_COUNT

logger = logging.getLogger(__name__)


class BackgroundTaskQueue:
    """Fixed pool of daemon worker threads for independent numeric jobs"""

    def __init__(self, max_workers: int = 2):
        self.task_queue = Queue()
        self.results: Dict[str, Dict] = {}
        self.events: Dict[str, threading.Event] = {}
        self.lock = threading.Lock()
        self.max_workers = max_workers
        self.workers = []
        self.stop_signal = threading.Event()

        for i in range(max_workers):
            worker = threading.Thread(target=self._worker, daemon=True, name=f"Worker-{i+1}")
            worker.start()
            self.workers.append(worker)

        logger.debug(f"BackgroundTaskQueue started with {max_workers} workers")

    def _worker(self):
        while not self.stop_signal.is_set():
            try:
                # Timeout lets the worker notice stop_signal
                task_id, func, args, kwargs = self.task_queue.get(timeout=1.0)
            except Empty:
                continue

            try:
                result = func(*args, **kwargs)
                outcome = {"status": "completed", "result": result, "completed_at": time.time()}
            except Exception as e:
                outcome = {"status": "failed", "error": e, "completed_at": time.time()}
                logger.warning(f"Task {task_id} failed: {e}")
            finally:
                self.task_queue.task_done()

            with self.lock:
                self.results[task_id] = outcome
                event = self.events[task_id]
            event.set()

    def submit_task(self, func: Callable, *args, **kwargs) -> str:
        """Submit a task to the queue and return its id"""
        task_id = str(uuid.uuid4())
        with self.lock:
            self.results[task_id] = {"status": "queued", "submitted_at": time.time()}
            self.events[task_id] = threading.Event()
        self.task_queue.put((task_id, func, args, kwargs))
        return task_id

    def get_task_status(self, task_id: str) -> Dict[str, Any]:
        with self.lock:
            return self.results.get(task_id, {"status": "not_found"})

    def wait_for_completion(self, task_id: str, timeout: float = None) -> bool:
        with self.lock:
            event = self.events.get(task_id)
        if event is None:
            return False
        return event.wait(timeout)

    def pop_result(self, task_id: str) -> Dict[str, Any]:
        """Wait for a task, then forget it and return its outcome"""
        self.wait_for_completion(task_id)
        with self.lock:
            self.events.pop(task_id, None)
            return self.results.pop(task_id, {"status": "not_found"})

    def map(self, func: Callable, items: Iterable[Any]) -> List[Dict[str, Any]]:
        """Run func over items on the pool; outcomes come back in input order"""
        task_ids = [self.submit_task(func, item) for item in items]
        return [self.pop_result(task_id) for task_id in task_ids]

    def shutdown(self):
        logger.debug("Shutting down BackgroundTaskQueue...")
        self.task_queue.join()
        self.stop_signal.set()


# Global instance
background_queue = BackgroundTaskQueue(max_workers=max(1, WORKER_COUNT))
