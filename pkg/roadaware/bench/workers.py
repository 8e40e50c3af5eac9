# -*- coding: utf-8 -*-

from queue import Empty
from queue import Queue
from threading import Event
from threading import Lock
from threading import Thread

from tqdm import tqdm

from roadaware.base.logs import Logs
from roadaware.base.utils.time import elapsed_us
from roadaware.base.utils.time import monotonic_us


class TrialPool:
    """Worker threads running benchmark trials from a queue.

    Each worker runs one whole trial at a time so that latency measurements
    inside a trial are not interleaved with another trial on the same worker.
    """

    def __init__(self, num_workers, queue_timeout_s=1.0, progress=True):
        self.num_workers = num_workers
        self.queue_timeout_s = queue_timeout_s
        self.progress = progress
        self.logs = Logs(name="bench-pool")

    def run(self, handler, tasks, description="trials"):
        """Calls handler(task) for every task and returns the results in task
        order. The first failure is raised once the workers have stopped."""

        tasks = list(tasks)
        self.results = [None] * len(tasks)
        self.errors = []
        self.lock = Lock()
        self.progress_bar = tqdm(total=len(tasks), desc=description,
                                 disable=not self.progress)
        self.start_queue(handler)
        for index, task in enumerate(tasks):
            self.queue.put((index, task))
        self.stop_queue()
        self.progress_bar.close()

        if self.errors:
            index, error = min(self.errors, key=lambda item: item[0])
            raise error
        return self.results

    def start_queue(self, handler):
        """Creates a queue and starts the worker threads."""

        self.queue = Queue()
        self.stop_event = Event()
        self.logs.debug("Starting %s worker threads." % self.num_workers)
        self.workers = []
        for worker_id in range(self.num_workers):
            worker = Thread(target=self.process_queue, args=[worker_id, handler])
            worker.daemon = True
            worker.start()
            self.workers.append(worker)

    def stop_queue(self):
        """Waits for the queued tasks, then stops the worker threads."""

        self.queue.join()
        self.logs.debug("Stopping %d worker threads." % len(self.workers))
        self.stop_event.set()
        for worker in self.workers:
            # Block until the thread terminates.
            worker.join()

    def process_queue(self, worker_id, handler):
        """Continuously processes tasks on the queue."""

        logs = Logs("bench-worker-%s" % worker_id)
        logs.debug("Started worker thread: %s" % worker_id)
        while not self.stop_event.is_set():
            try:
                index, task = self.queue.get(block=True, timeout=self.queue_timeout_s)
            except Empty:
                # Timed out on an empty queue.
                continue
            start_us = monotonic_us()
            try:
                result = handler(task)
                with self.lock:
                    self.results[index] = result
            except Exception as error:
                # Failures in background threads are reported by run().
                logs.catch()
                with self.lock:
                    self.errors.append((index, error))
            finally:
                with self.lock:
                    self.progress_bar.update(1)
                self.queue.task_done()
            logs.debug("Worker %s took %.f ms with %d tasks remaining."
                       % (worker_id, elapsed_us(start_us) / 1000.0, self.queue.qsize()))
        logs.debug("Stopped worker thread: %s" % worker_id)
