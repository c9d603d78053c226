package com.bank.model;

public class Transaction {
    public static final String TAG = "TX";
    public String type;
    public double amount;

    public Transaction(String type, double amount) {
        this.type = type;
        this.amount = amount;
    }

    @Deprecated
    public String describe() {
        return TAG + ": " + type + " " + amount;
    }
}
