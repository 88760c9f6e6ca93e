class E {
    void run(Runnable r) {
        try {
            /* @insert */
            r.run();
        } finally {
            System.out.println("done");
        }
    }
}
