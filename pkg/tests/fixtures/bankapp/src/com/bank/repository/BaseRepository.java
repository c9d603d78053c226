package com.bank.repository;

public abstract class BaseRepository {
    protected String connection = "jdbc:bank";

    public void connect() {
        System.out.println("connecting " + connection);
    }

    protected abstract Object mapRow(String row);
}
